#include "mlsqr/config.hpp"

#include <algorithm>
#include <fstream>

namespace mlsqr {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const char* section,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + section);
    }
  }
}

const json& need(const json& obj, const char* section, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(std::string("missing key '") + key + "' in " + section);
  }
  return *it;
}

double as_number(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("key '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

int as_positive_int(const json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError(std::string("key '") + key + "' must be a positive integer");
  }
  return v.get<int>();
}

bool as_bool(const json& v, const char* key) {
  if (!v.is_boolean()) throw ConfigError(std::string("key '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

Phantom1D parse_phantom1d(const json& arr) {
  if (!arr.is_array()) throw ConfigError("key 'phantom' must be an array of [position, level]");
  Phantom1D p;
  for (const json& item : arr) {
    if (!item.is_array() || item.size() != 2) {
      throw ConfigError("each 'phantom' entry must be a [position, level] pair");
    }
    p.jumps.emplace_back(as_number(item[0], "phantom position"),
                         as_number(item[1], "phantom level"));
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid 'phantom': ") + e.what());
  }
  return p;
}

Phantom2D parse_phantom2d(const json& arr) {
  if (!arr.is_array()) throw ConfigError("key 'phantom' must be an array of shapes");
  Phantom2D p;
  for (const json& item : arr) {
    if (!item.is_object()) throw ConfigError("each 'phantom' entry must be a shape object");
    Shape2D s;
    const std::string kind = as_string(need(item, "phantom shape", "shape"), "shape");
    if (kind == "rect") {
      reject_unknown(item, "phantom shape", {"shape", "x0", "y0", "x1", "y1", "value"});
      s.kind = Shape2D::Kind::rectangle;
      s.x0 = as_number(need(item, "phantom shape", "x0"), "x0");
      s.y0 = as_number(need(item, "phantom shape", "y0"), "y0");
      s.x1 = as_number(need(item, "phantom shape", "x1"), "x1");
      s.y1 = as_number(need(item, "phantom shape", "y1"), "y1");
    } else if (kind == "disk") {
      reject_unknown(item, "phantom shape", {"shape", "cx", "cy", "r", "value"});
      s.kind = Shape2D::Kind::disk;
      s.cx = as_number(need(item, "phantom shape", "cx"), "cx");
      s.cy = as_number(need(item, "phantom shape", "cy"), "cy");
      s.radius = as_number(need(item, "phantom shape", "r"), "r");
    } else {
      throw ConfigError("key 'shape' must be 'rect' or 'disk'");
    }
    s.value = as_number(need(item, "phantom shape", "value"), "value");
    p.shapes.push_back(s);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid 'phantom': ") + e.what());
  }
  return p;
}

ProblemConfig parse_problem(const json& obj) {
  if (!obj.is_object()) throw ConfigError("'problem' must be an object");
  ProblemConfig p;
  p.raw = obj;
  const std::string type = as_string(need(obj, "problem", "type"), "type");
  if (type == "deconv1d") {
    reject_unknown(obj, "problem", {"type", "n", "sigma_f", "sigma_n", "seed", "phantom"});
    p.type = ProblemConfig::Type::deconv1d;
    p.n = as_count(need(obj, "problem", "n"), "n");
    if (p.n < 2) throw ConfigError("key 'n' must be at least 2");
    if (obj.contains("phantom")) p.phantom1d = parse_phantom1d(obj["phantom"]);
  } else if (type == "deblur2d") {
    reject_unknown(obj, "problem", {"type", "nx", "ny", "sigma_f", "sigma_n", "seed", "phantom"});
    p.type = ProblemConfig::Type::deblur2d;
    p.nx = as_count(need(obj, "problem", "nx"), "nx");
    p.ny = as_count(need(obj, "problem", "ny"), "ny");
    if (p.nx < 2 || p.ny < 2) throw ConfigError("keys 'nx'/'ny' must be at least 2");
    if (obj.contains("phantom")) p.phantom2d = parse_phantom2d(obj["phantom"]);
  } else {
    throw ConfigError("key 'type' must be 'deconv1d' or 'deblur2d'");
  }
  p.sigma_f = as_number(need(obj, "problem", "sigma_f"), "sigma_f");
  if (!(p.sigma_f > 0.0)) throw ConfigError("key 'sigma_f' must be positive");
  p.sigma_n = as_number(need(obj, "problem", "sigma_n"), "sigma_n");
  if (!(p.sigma_n >= 0.0)) throw ConfigError("key 'sigma_n' must be nonnegative");
  p.seed = as_count(need(obj, "problem", "seed"), "seed");
  return p;
}

PenaltyKind parse_penalty_kind(const std::string& kind) {
  if (kind == "tikhonov") return PenaltyKind::tikhonov;
  if (kind == "tv_smoothed") return PenaltyKind::tv_smoothed;
  if (kind == "pm_log") return PenaltyKind::perona_malik_log;
  if (kind == "pm_exp") return PenaltyKind::perona_malik_exp;
  throw ConfigError("key 'kind' must be one of tikhonov, tv_smoothed, pm_log, pm_exp");
}

StoppingConfig parse_stopping(const json& obj) {
  if (!obj.is_object()) throw ConfigError("'stopping' must be an object");
  reject_unknown(obj, "stopping",
                 {"criteria", "atol", "btol", "conlim", "delta", "eta", "max_iters"});
  StoppingConfig s;
  const json& crit = need(obj, "stopping", "criteria");
  if (!crit.is_array()) throw ConfigError("key 'criteria' must be an array");
  for (const json& c : crit) {
    const std::string name = as_string(c, "criteria");
    if (name == "S1") s.use_s1 = true;
    else if (name == "S2") s.use_s2 = true;
    else if (name == "S3") s.use_s3 = true;
    else if (name == "S4") s.use_s4 = true;
    else throw ConfigError("key 'criteria' allows S1, S2, S3, S4 (iteration cap is implicit)");
  }
  if (obj.contains("atol")) s.atol = as_number(obj["atol"], "atol");
  if (obj.contains("btol")) s.btol = as_number(obj["btol"], "btol");
  if (obj.contains("conlim")) s.conlim = as_number(obj["conlim"], "conlim");
  if (obj.contains("delta")) s.delta = as_number(obj["delta"], "delta");
  if (obj.contains("eta")) s.eta = as_number(obj["eta"], "eta");
  s.max_iters = as_positive_int(need(obj, "stopping", "max_iters"), "max_iters");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid 'stopping': ") + e.what());
  }
  return s;
}

SolverConfig parse_solver(const json& obj) {
  if (!obj.is_object()) throw ConfigError("'solver' must be an object");
  reject_unknown(obj, "solver",
                 {"method", "tau", "penalty", "regularizer", "stopping", "spd", "epsilon",
                  "inner_cap", "rel_decrease_threshold", "max_outer", "store_basis"});
  SolverConfig s;
  const std::string method = as_string(need(obj, "solver", "method"), "method");
  if (method == "lsqr") s.method = SolverConfig::Method::lsqr;
  else if (method == "mlsqr") s.method = SolverConfig::Method::mlsqr;
  else if (method == "cg_normal") s.method = SolverConfig::Method::cg_normal;
  else if (method == "lagged_diffusivity") s.method = SolverConfig::Method::lagged_diffusivity;
  else {
    throw ConfigError("key 'method' must be lsqr, mlsqr, cg_normal or lagged_diffusivity");
  }

  if (obj.contains("tau")) {
    s.tau = as_number(obj["tau"], "tau");
    if (!(s.tau >= 0.0)) throw ConfigError("key 'tau' must be nonnegative");
  }
  if (obj.contains("penalty")) {
    const json& pen = obj["penalty"];
    if (!pen.is_object()) throw ConfigError("'penalty' must be an object");
    reject_unknown(pen, "penalty", {"kind", "T"});
    const PenaltyKind kind = parse_penalty_kind(as_string(need(pen, "penalty", "kind"), "kind"));
    double threshold = 1.0;
    if (kind != PenaltyKind::tikhonov) {
      threshold = as_number(need(pen, "penalty", "T"), "T");
      if (!(threshold > 0.0)) throw ConfigError("key 'T' must be positive");
    } else if (pen.contains("T")) {
      threshold = as_number(pen["T"], "T");
    }
    s.penalty = PenaltySpec{kind, threshold, 0.0};
    s.penalty_given = true;
  }
  if (obj.contains("regularizer")) {
    s.regularizer = as_string(obj["regularizer"], "regularizer");
    if (s.regularizer != "ideal" && s.regularizer != "laplacian") {
      throw ConfigError("key 'regularizer' must be 'ideal' or 'laplacian'");
    }
  }
  s.stopping = parse_stopping(need(obj, "solver", "stopping"));
  if (obj.contains("spd")) {
    const json& spd = obj["spd"];
    if (!spd.is_object()) throw ConfigError("'spd' must be an object");
    reject_unknown(spd, "spd", {"mode", "k_inner"});
    const std::string mode = as_string(need(spd, "spd", "mode"), "mode");
    if (mode == "cholesky") s.spd_mode = SpdSolverMode::direct_cholesky;
    else if (mode == "inner_cg") s.spd_mode = SpdSolverMode::inner_cg;
    else throw ConfigError("key 'mode' must be 'cholesky' or 'inner_cg'");
    if (spd.contains("k_inner")) s.k_inner = as_positive_int(spd["k_inner"], "k_inner");
  }
  if (obj.contains("epsilon")) {
    const json& eps = obj["epsilon"];
    if (eps.is_string()) {
      if (eps.get<std::string>() != "auto") {
        throw ConfigError("key 'epsilon' must be a number or 'auto'");
      }
    } else {
      const double value = as_number(eps, "epsilon");
      if (!(value >= 0.0)) throw ConfigError("key 'epsilon' must be nonnegative");
      s.epsilon = value;
    }
  }
  if (obj.contains("inner_cap")) s.inner_cap = as_positive_int(obj["inner_cap"], "inner_cap");
  if (obj.contains("rel_decrease_threshold")) {
    s.rel_decrease_threshold = as_number(obj["rel_decrease_threshold"], "rel_decrease_threshold");
    if (!(s.rel_decrease_threshold > 0.0 && s.rel_decrease_threshold < 1.0)) {
      throw ConfigError("key 'rel_decrease_threshold' must lie in (0, 1)");
    }
  }
  if (obj.contains("max_outer")) s.max_outer = as_positive_int(obj["max_outer"], "max_outer");
  if (obj.contains("store_basis")) s.store_basis = as_bool(obj["store_basis"], "store_basis");

  const bool needs_penalty = s.method != SolverConfig::Method::lsqr;
  if (needs_penalty && !s.penalty_given) {
    throw ConfigError(std::string("method '") + method + "' requires a 'penalty' section");
  }
  return s;
}

OutputConfig parse_output(const json& obj) {
  if (!obj.is_object()) throw ConfigError("'output' must be an object");
  reject_unknown(obj, "output",
                 {"directory", "traces", "solutions", "basis_vectors", "outer_snapshots"});
  OutputConfig o;
  o.directory = as_string(need(obj, "output", "directory"), "directory");
  if (obj.contains("traces")) o.traces = as_bool(obj["traces"], "traces");
  if (obj.contains("solutions")) o.solutions = as_bool(obj["solutions"], "solutions");
  if (obj.contains("basis_vectors")) {
    o.basis_vectors = static_cast<int>(as_count(obj["basis_vectors"], "basis_vectors"));
  }
  if (obj.contains("outer_snapshots")) {
    o.outer_snapshots = as_bool(obj["outer_snapshots"], "outer_snapshots");
  }
  return o;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration root must be an object");
  reject_unknown(doc, "configuration root", {"problem", "solver", "output"});
  ExperimentConfig cfg;
  cfg.problem = parse_problem(need(doc, "configuration root", "problem"));
  cfg.solver = parse_solver(need(doc, "configuration root", "solver"));
  cfg.output = parse_output(need(doc, "configuration root", "output"));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

std::string_view to_string(SolverConfig::Method method) {
  switch (method) {
    case SolverConfig::Method::lsqr: return "lsqr";
    case SolverConfig::Method::mlsqr: return "mlsqr";
    case SolverConfig::Method::cg_normal: return "cg_normal";
    case SolverConfig::Method::lagged_diffusivity: return "lagged_diffusivity";
  }
  return "unknown";
}

}  // namespace mlsqr
