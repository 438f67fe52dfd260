#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "raas/harness.hpp"

namespace raas {

using nlohmann::json;

namespace {

const std::set<std::string> kParamKeys = {
    "mu",        "nu",       "theta",      "vartheta",      "gamma_max",
    "gamma0",    "gamma0_L", "alpha0",     "eps_f",         "eps_g",
    "check2",    "eta",      "eta_L",      "beta",          "tau_clip",
    "n_vartheta", "n_theta", "vartheta_safe", "theta_safe",
    "disable_check2_on_theta_switch", "tolerance_mode"};

struct Collector {
  std::vector<std::string> errors;
  void add(const std::string& s) { errors.push_back(s); }
};

bool number_at(const json& j, const std::string& key, double& out,
               const std::string& where, Collector& c) {
  if (!j.contains(key)) return false;
  const json& v = j.at(key);
  if (!v.is_number()) {
    c.add(where + "." + key + ": expected a number");
    return false;
  }
  out = v.get<double>();
  return true;
}

void apply_params(const json& j, MethodConfig& m, const std::string& where,
                  Collector& c) {
  if (!j.is_object()) {
    c.add(where + ": expected an object");
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "tag" || k == "name") continue;
    if (!kParamKeys.count(k)) c.add(where + ": unknown parameter '" + k + "'");
  }
  RaasParams& p = m.raas;
  double v = 0;
  if (number_at(j, "mu", v, where, c)) m.mu = v;
  number_at(j, "nu", p.nu, where, c);
  number_at(j, "theta", p.theta, where, c);
  number_at(j, "vartheta", p.vartheta, where, c);
  number_at(j, "gamma_max", p.gamma_max, where, c);
  if (number_at(j, "gamma0", v, where, c)) {
    p.gamma0 = v;
    m.gamma0_L.reset();
  }
  if (number_at(j, "gamma0_L", v, where, c)) m.gamma0_L = v;
  number_at(j, "alpha0", p.alpha0, where, c);
  number_at(j, "eps_f", p.eps_f, where, c);
  number_at(j, "eps_g", p.eps_g, where, c);
  if (j.contains("check2")) {
    if (j["check2"].is_boolean()) p.check2 = j["check2"].get<bool>();
    else c.add(where + ".check2: expected a boolean");
  }
  if (number_at(j, "eta", v, where, c)) {
    m.baseline.eta = v;
    m.eta_L.reset();
  }
  if (number_at(j, "eta_L", v, where, c)) m.eta_L = v;
  number_at(j, "beta", m.baseline.beta, where, c);
  number_at(j, "tau_clip", m.baseline.tau_clip, where, c);
  if (number_at(j, "n_vartheta", v, where, c)) p.sw.n_vartheta = int(v);
  if (number_at(j, "n_theta", v, where, c)) p.sw.n_theta = int(v);
  number_at(j, "vartheta_safe", p.sw.vartheta_safe, where, c);
  number_at(j, "theta_safe", p.sw.theta_safe, where, c);
  if (j.contains("disable_check2_on_theta_switch")) {
    const json& b = j["disable_check2_on_theta_switch"];
    if (b.is_boolean()) p.sw.disable_check2_on_theta_switch = b.get<bool>();
    else c.add(where + ".disable_check2_on_theta_switch: expected a boolean");
  }
  if (j.contains("tolerance_mode")) {
    const json& t = j["tolerance_mode"];
    std::string s = t.is_string() ? t.get<std::string>() : "";
    if (s == "theory") p.tol_mode = ToleranceMode::Theory;
    else if (s == "constant") p.tol_mode = ToleranceMode::Constant;
    else c.add(where + ".tolerance_mode: expected \"theory\" or \"constant\"");
  }
}

std::string display_name(const std::string& tag) {
  static const std::pair<const char*, const char*> names[] = {
      {"raas", "RAAS"},       {"raas_single", "RAAS-Single"},
      {"raas_double", "RAAS-Double"}, {"sass", "SASS"},
      {"adp_nag", "adp-NAG"}, {"sgd", "SGD"},
      {"cons_nag", "cons-NAG"}, {"acc_clip", "Acc-Clip"}};
  for (auto& [t, n] : names)
    if (tag == t) return n;
  return tag;
}

// Applies the fixed restrictions that define each tag.
void apply_tag(MethodConfig& m) {
  RaasParams& p = m.raas;
  m.cap_vartheta = p.vartheta;
  if (m.tag == "raas") {
    p.sw.enabled = false;
  } else if (m.tag == "raas_single") {
    p.sw.enabled = true;
    p.sw.switch_theta = false;
  } else if (m.tag == "raas_double") {
    p.sw.enabled = true;
    p.sw.switch_theta = true;
  } else if (m.tag == "sass") {
    p = sass_params(p);
  } else if (m.tag == "adp_nag") {
    p = adp_nag_params(p);
  } else if (m.tag == "sgd") {
    m.baseline.kind = BaselineKind::Sgd;
  } else if (m.tag == "cons_nag") {
    m.baseline.kind = BaselineKind::ConsNag;
  } else if (m.tag == "acc_clip") {
    m.baseline.kind = BaselineKind::AccClip;
  }
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<double> number_list(const json& j, const std::string& where,
                                Collector& c) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) {
    c.add(where + ": expected a number or array of numbers");
    return out;
  }
  for (const json& v : j) {
    if (v.is_number()) out.push_back(v.get<double>());
    else c.add(where + ": expected numbers");
  }
  return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where, Collector& c) {
  if (!j.is_object()) return;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) c.add(where + ": unknown field '" + it.key() + "'");
}

}  // namespace

const std::vector<std::string>& method_tags() {
  static const std::vector<std::string> tags = {
      "raas", "raas_single", "raas_double", "sass",
      "adp_nag", "sgd", "cons_nag", "acc_clip"};
  return tags;
}

bool is_adaptive(const std::string& tag) {
  return tag == "raas" || tag == "raas_single" || tag == "raas_double" ||
         tag == "sass" || tag == "adp_nag";
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  Collector c;
  ExperimentConfig cfg;
  check_keys(root,
             {"problem", "noise", "sweep", "params", "methods", "seeds", "T", "R",
              "out_dir", "stop", "theory", "jobs"},
             "config", c);

  // problem
  if (!root.contains("problem")) {
    c.add("config.problem: missing");
  } else {
    const json& pj = root["problem"];
    std::string type = "quadratic";
    if (!pj.is_object()) {
      c.add("config.problem: expected an object");
      type = "";
    } else if (pj.contains("type")) {
      type = pj["type"].is_string() ? pj["type"].get<std::string>() : "?";
    }
    double v = 0;
    if (type == "quadratic") {
      check_keys(pj, {"type", "d", "L", "mu", "seed"}, "problem", c);
      cfg.problem.type = ProblemConfig::Type::Quadratic;
      QuadraticSpec& q = cfg.problem.quadratic;
      if (number_at(pj, "d", v, "problem", c)) q.d = int(v);
      number_at(pj, "L", q.L, "problem", c);
      number_at(pj, "mu", q.mu, "problem", c);
      if (number_at(pj, "seed", v, "problem", c)) q.seed = std::uint64_t(v);
      if (q.d < 10) c.add("problem.d: quadratic requires d >= 10");
      if (!(q.L > 0)) c.add("problem.L: must be > 0");
      if (q.mu < 0 || q.mu > q.L) c.add("problem.mu: must lie in [0, L]");
    } else if (type == "logistic") {
      check_keys(pj, {"type", "n", "d", "lambda", "seed"}, "problem", c);
      cfg.problem.type = ProblemConfig::Type::Logistic;
      LogisticSpec& l = cfg.problem.logistic;
      if (number_at(pj, "n", v, "problem", c)) l.n = int(v);
      if (number_at(pj, "d", v, "problem", c)) l.d = int(v);
      number_at(pj, "lambda", l.lambda, "problem", c);
      if (number_at(pj, "seed", v, "problem", c)) l.seed = std::uint64_t(v);
      if (l.n < 1 || l.d < 1) c.add("problem: n and d must be >= 1");
      if (!(l.lambda > 0)) c.add("problem.lambda: must be > 0");
    } else if (!type.empty()) {
      c.add("problem.type: unknown problem type '" + type + "'");
    }
  }

  // noise
  if (root.contains("noise")) {
    const json& nj = root["noise"];
    check_keys(nj, {"sigma_g", "k_g", "bias_rel", "sigma_f", "k_f"}, "noise", c);
    number_at(nj, "sigma_g", cfg.noise.sigma_g, "noise", c);
    number_at(nj, "k_g", cfg.noise.k_g, "noise", c);
    number_at(nj, "bias_rel", cfg.noise.bias_rel, "noise", c);
    number_at(nj, "sigma_f", cfg.noise.sigma_f, "noise", c);
    number_at(nj, "k_f", cfg.noise.k_f, "noise", c);
  }
  try {
    validate(cfg.noise);
  } catch (const ConfigError& e) {
    c.add(e.what());
  }

  if (root.contains("sweep")) {
    const json& sj = root["sweep"];
    check_keys(sj, {"sigma_g", "sigma_f", "bias_rel"}, "sweep", c);
    if (sj.contains("sigma_g")) cfg.grid.sigma_g = number_list(sj["sigma_g"], "sweep.sigma_g", c);
    if (sj.contains("sigma_f")) cfg.grid.sigma_f = number_list(sj["sigma_f"], "sweep.sigma_f", c);
    if (sj.contains("bias_rel")) cfg.grid.bias_rel = number_list(sj["bias_rel"], "sweep.bias_rel", c);
  }

  // shared parameters, then per-method overrides
  MethodConfig base;
  base.raas.tol_mode = ToleranceMode::Constant;
  base.raas.eps_f = 0.6;
  base.gamma0_L = 0.15;
  base.eta_L = 1.0;
  if (root.contains("params")) apply_params(root["params"], base, "params", c);

  if (!root.contains("methods") || !root["methods"].is_array() || root["methods"].empty()) {
    c.add("config.methods: expected a non-empty array");
  } else {
    int idx = 0;
    for (const json& mj : root["methods"]) {
      std::string where = "methods[" + std::to_string(idx++) + "]";
      MethodConfig m = base;
      if (mj.is_string()) {
        m.tag = mj.get<std::string>();
      } else if (mj.is_object() && mj.contains("tag") && mj["tag"].is_string()) {
        m.tag = mj["tag"].get<std::string>();
        apply_params(mj, m, where, c);
        if (mj.contains("name") && mj["name"].is_string()) m.name = mj["name"];
      } else {
        c.add(where + ": expected a tag string or an object with a 'tag'");
        continue;
      }
      const auto& tags = method_tags();
      if (std::find(tags.begin(), tags.end(), m.tag) == tags.end()) {
        c.add(where + ": unknown method tag '" + m.tag + "'");
        continue;
      }
      if (m.name.empty()) m.name = display_name(m.tag);
      apply_tag(m);
      cfg.methods.push_back(m);
    }
    std::set<std::string> names;
    for (const auto& m : cfg.methods)
      if (!names.insert(m.name).second) c.add("methods: duplicate method name '" + m.name + "'");
  }

  bool seeds_given = false;
  if (root.contains("seeds")) {
    const json& sj = root["seeds"];
    if (!sj.is_array() || sj.empty()) {
      c.add("config.seeds: expected a non-empty array of integers");
    } else {
      seeds_given = true;
      cfg.seeds.clear();
      for (const json& s : sj) {
        if (s.is_number_integer() && s.get<long long>() >= 0) cfg.seeds.push_back(s.get<std::uint64_t>());
        else c.add("config.seeds: expected non-negative integers");
      }
    }
  }
  double v = 0;
  if (number_at(root, "T", v, "config", c)) cfg.T = long(v);
  if (cfg.T < 1) c.add("config.T: must be >= 1");
  if (number_at(root, "R", v, "config", c)) {
    cfg.R = int(v);
  } else {
    cfg.R = int(cfg.seeds.size());
  }
  if (std::size_t(cfg.R) != cfg.seeds.size())
    c.add("config.R: R = " + std::to_string(cfg.R) + " differs from the number of seeds (" +
          std::to_string(cfg.seeds.size()) + (seeds_given ? ")" : ", default seeds)"));
  if (root.contains("out_dir")) {
    if (root["out_dir"].is_string()) cfg.out_dir = root["out_dir"];
    else c.add("config.out_dir: expected a string");
  }
  if (number_at(root, "jobs", v, "config", c)) cfg.jobs = std::max(1, int(v));

  if (root.contains("stop")) {
    const json& sj = root["stop"];
    check_keys(sj, {"eps_phi", "eps_grad"}, "stop", c);
    StopRule s;
    number_at(sj, "eps_phi", s.eps_phi, "stop", c);
    number_at(sj, "eps_grad", s.eps_grad, "stop", c);
    cfg.stop = s;
  }

  if (root.contains("theory")) {
    const json& tj = root["theory"];
    check_keys(tj, {"moments", "S_f", "S_g", "p_hat", "B"}, "theory", c);
    number_at(tj, "S_f", cfg.theory.S_f, "theory", c);
    number_at(tj, "S_g", cfg.theory.S_g, "theory", c);
    number_at(tj, "p_hat", cfg.theory.p_hat, "theory", c);
    if (number_at(tj, "B", v, "theory", c)) cfg.theory.B = v;
    if (tj.contains("moments")) {
      const json& mj = tj["moments"];
      check_keys(mj, {"eps_g", "eps_f", "upsilon_g", "upsilon_f", "delta", "varrho"},
                 "theory.moments", c);
      OracleMoments m;
      number_at(mj, "eps_g", m.eps_g, "theory.moments", c);
      number_at(mj, "eps_f", m.eps_f, "theory.moments", c);
      number_at(mj, "upsilon_g", m.upsilon_g, "theory.moments", c);
      number_at(mj, "upsilon_f", m.upsilon_f, "theory.moments", c);
      number_at(mj, "delta", m.delta, "theory.moments", c);
      number_at(mj, "varrho", m.varrho, "theory.moments", c);
      cfg.theory.moments = m;
    }
  }

  if (!c.errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : c.errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  cfg.canonical = root.dump();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ProblemPtr build_problem(const ProblemConfig& pc) {
  if (pc.type == ProblemConfig::Type::Quadratic) return make_quadratic(pc.quadratic);
  return make_logistic(pc.logistic);
}

RaasParams resolve_raas(const MethodConfig& m, const Problem& p) {
  RaasParams r = m.raas;
  r.mu = m.mu ? *m.mu : p.mu;
  if (m.gamma0_L) r.gamma0 = *m.gamma0_L / p.L;
  if (m.tag == "sass") {
    // Shares the step cap of the momentum configuration it is compared with.
    if (!(r.gamma_max > 0))
      r.gamma_max = default_gamma_max(r.mu, m.cap_vartheta, r.gamma0);
  }
  if (m.tag == "adp_nag" && r.mu > 0 && r.gamma_max > 0)
    r.gamma_max = std::min(r.gamma_max, default_gamma_max(r.mu, 0.0, r.gamma0));
  return finalize(r);
}

BaselineParams resolve_baseline(const MethodConfig& m, const Problem& p) {
  BaselineParams b = m.baseline;
  if (m.eta_L) b.eta = *m.eta_L / p.L;
  return b;
}

std::uint64_t fingerprint(const std::string& canonical, const std::string& method,
                          std::uint64_t seed) {
  // FNV-1a over the canonical config, method name and seed.
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  feed(canonical);
  feed(method);
  feed(std::to_string(seed));
  return h;
}

}  // namespace raas
