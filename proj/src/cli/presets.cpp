#include "fluoinv/cli/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace fluoinv::cli {

using nlohmann::json;

namespace {

json example1() {
  return {
      {"preset", "example1"},
      {"seed", 0},
      {"beta", 1.0},
      {"grid", {{"dim", 2}, {"cells", 100}}},
      {"measurements", {{"n", 10000}, {"noise", "gaussian"}, {"sigma", 0.002}, {"layout", "halton"}}},
      {"fit", {{"truth", "example1"}, {"s", 0}, {"lambda_policy", "prior"}}},
      {"rates",
       {{"cells", 64},
        {"target", "p1"},
        {"s", {0, 1}},
        {"trials", 10},
        {"n_start", 1e4},
        {"n_factor", std::sqrt(10.0)},
        {"points", 5}}},
  };
}

json example2(const std::string& source) {
  return {
      {"preset", "example2-" + source},
      {"seed", 0},
      {"beta", 1.0},
      {"grid", {{"dim", 2}, {"cells", 100}}},
      {"problem", {{"T", 1.0}, {"tau", 0.01}, {"M", 5.0}, {"p", "example2"}, {"b", "example2"}}},
      {"source", "example2-" + source},
      {"measurements", {{"n", 500}, {"noise", "gaussian"}, {"sigma_relative", 0.01}, {"layout", "halton"}}},
      {"fit", {{"truth", "example2-" + source}, {"s", 1}, {"lambda_policy", "self-consistent"}}},
      {"p2", {{"clean", false}, {"tol", 1e-10}, {"max_iter", 200}, {"clamp", true}}},
      {"rates",
       {{"cells", 50},
        {"target", "p2"},
        {"s", {0, 1}},
        {"trials", 10},
        {"n_start", 500},
        {"n_factor", std::sqrt(10.0)},
        {"points", 5}}},
      {"verify", {{"cells", 32}}},
  };
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"example1", "example1-tail", "example2-smooth", "example2-discontinuous", "zero-source", "violated",
          "stability"};
}

bool has_preset(const std::string& name) {
  for (const auto& n : preset_names())
    if (n == name) return true;
  return false;
}

json preset_document(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example1-tail") {
    auto d = example1();
    d["preset"] = name;
    d["rates"]["cells"] = 50;
    d["rates"]["s"] = {0};
    d["rates"]["points"] = 2;
    d["rates"]["tail_trials"] = 200;
    return d;
  }
  if (name == "example2-smooth") return example2("smooth");
  if (name == "example2-discontinuous") return example2("discontinuous");
  if (name == "zero-source") {
    auto d = example2("smooth");
    d["preset"] = name;
    d["source"] = "zero";
    return d;
  }
  if (name == "violated") {
    // Negated boundary input: positivity must fail.
    auto d = example2("smooth");
    d["preset"] = name;
    d["problem"]["b"] = "example2-flipped";
    return d;
  }
  if (name == "stability") {
    // Large background absorption, small T and M: the smallness factor of
    // the stability estimate drops below one.
    auto d = example2("smooth");
    d["preset"] = name;
    d["beta"] = 1e-3;
    d["grid"]["cells"] = 32;
    d["problem"] = {{"T", 0.04}, {"tau", 4e-4}, {"M", 0.01}, {"p", 100.0}, {"b", 1.0}};
    d["source"] = 0.005;
    return d;
  }
  throw std::invalid_argument("unknown preset \"" + name + "\"");
}

std::string default_preset(const std::string& command) {
  if (command == "p1" || command == "rates" || command == "spectral") return "example1";
  return "example2-smooth";
}

}  // namespace fluoinv::cli
