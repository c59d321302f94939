#include "lrrfuse/cli/config.hpp"

#include <fstream>
#include <string>

#include "lrrfuse/errors.hpp"

namespace lrrfuse::cli {

namespace {

template <typename T>
T value_of(const nlohmann::json& json, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!json.is_number()) throw ParameterError("config key '" + key + "' must be a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!json.is_boolean()) throw ParameterError("config key '" + key + "' must be true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!json.is_string()) throw ParameterError("config key '" + key + "' must be a string");
    } else {
      if (!json.is_number_unsigned()) {
        throw ParameterError("config key '" + key + "' must be a non-negative integer");
      }
    }
    return json.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json config_to_json(const FusionConfig& config) {
  nlohmann::json j;
  j["window"] = config.window;
  j["step"] = config.step;
  j["bins"] = config.bins;
  j["hog_threshold"] = config.hog_threshold;
  j["atoms"] = config.ksvd.atoms;
  j["sparsity"] = config.ksvd.sparsity;
  j["ksvd_iters"] = config.ksvd.iterations;
  j["seed"] = config.ksvd.seed;
  j["lambda"] = config.lrr.lambda;
  j["mu0"] = config.lrr.mu0 ? nlohmann::json(*config.lrr.mu0) : nlohmann::json("auto");
  j["rho"] = config.lrr.rho;
  j["mu_max"] = config.lrr.mu_max;
  j["tol"] = config.lrr.tol;
  j["max_iters"] = config.lrr.max_iterations;
  j["row_space"] = config.lrr.reduce_to_row_space;
  j["tie_break"] = config.tie_break == TieBreak::kPreferB ? "b" : "a";
  return j;
}

void apply_config_json(const nlohmann::json& json, FusionConfig& config) {
  if (!json.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [key, v] : json.items()) {
    if (key == "window") {
      config.window = value_of<std::size_t>(v, key);
    } else if (key == "step") {
      config.step = value_of<std::size_t>(v, key);
    } else if (key == "bins") {
      config.bins = value_of<std::size_t>(v, key);
    } else if (key == "hog_threshold") {
      config.hog_threshold = value_of<double>(v, key);
    } else if (key == "atoms") {
      config.ksvd.atoms = value_of<std::size_t>(v, key);
    } else if (key == "sparsity") {
      config.ksvd.sparsity = value_of<std::size_t>(v, key);
    } else if (key == "ksvd_iters") {
      config.ksvd.iterations = value_of<std::size_t>(v, key);
    } else if (key == "seed") {
      config.ksvd.seed = value_of<std::uint64_t>(v, key);
    } else if (key == "lambda") {
      config.lrr.lambda = value_of<double>(v, key);
    } else if (key == "mu0") {
      if (v.is_string() && v.get<std::string>() == "auto") {
        config.lrr.mu0.reset();
      } else {
        config.lrr.mu0 = value_of<double>(v, key);
      }
    } else if (key == "rho") {
      config.lrr.rho = value_of<double>(v, key);
    } else if (key == "mu_max") {
      config.lrr.mu_max = value_of<double>(v, key);
    } else if (key == "tol") {
      config.lrr.tol = value_of<double>(v, key);
    } else if (key == "max_iters") {
      config.lrr.max_iterations = value_of<std::size_t>(v, key);
    } else if (key == "row_space") {
      config.lrr.reduce_to_row_space = value_of<bool>(v, key);
    } else if (key == "tie_break") {
      const auto s = value_of<std::string>(v, key);
      if (s == "a") {
        config.tie_break = TieBreak::kPreferA;
      } else if (s == "b") {
        config.tie_break = TieBreak::kPreferB;
      } else {
        throw ParameterError("config key 'tie_break' must be \"a\" or \"b\"");
      }
    } else {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
}

void apply_config_file(const std::filesystem::path& path, FusionConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("config file " + path.string() + ": " + e.what());
  }
  apply_config_json(json, config);
}

}  // namespace lrrfuse::cli
