#include "plapflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "plapflow/csv.hpp"

namespace plapflow {

double parse_double(const std::string& s, const std::string& what) {
  double out = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(what + ": cannot parse number '" + s + "'");
  return out;
}

namespace {

long parse_int(const std::string& s, const std::string& what) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(what + ": cannot parse integer '" + s + "'");
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// tokens after the first are "key=value" pairs, e.g. "one_plus_exp a=1 b=1 c=1"
std::map<std::string, std::string> tail_params(const std::vector<std::string>& toks,
                                               const std::string& what) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos)
      throw ConfigError(what + ": expected key=value, got '" + toks[i] + "'");
    out[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return out;
}

Nonlinearity parse_nonlinearity(const std::string& spec) {
  const auto toks = split_ws(spec);
  if (toks.empty()) throw ConfigError("g: empty nonlinearity spec");
  auto params = tail_params(toks, "g");
  double a = 1.0, b = 1.0, c = 1.0;
  for (const auto& [k, v] : params) {
    if (k == "a") a = parse_double(v, "g.a");
    else if (k == "b") b = parse_double(v, "g.b");
    else if (k == "c") c = parse_double(v, "g.c");
    else throw ConfigError("g: unknown parameter '" + k + "'");
  }
  if (toks[0] == "one_plus_exp") return Nonlinearity::one_plus_exp(a, b, c);
  if (toks[0] == "power_decay") return Nonlinearity::power_decay(a, b, c);
  if (toks[0] == "exp_decay") return Nonlinearity::one_plus_exp(0.0, b, c);
  throw ConfigError("g: unknown nonlinearity family '" + toks[0] + "'");
}

LambdaSpec parse_lambda(const std::string& spec) {
  LambdaSpec ls;
  const std::string s = trim(spec);
  if (s == "mid") {
    ls.kind = LambdaSpec::Kind::Mid;
    return ls;
  }
  const auto star = s.find('*');
  if (star != std::string::npos) {
    const std::string mult = trim(s.substr(0, star));
    const std::string sym = trim(s.substr(star + 1));
    ls.value = parse_double(mult, "lambda multiplier");
    if (sym == "lambda_min") ls.kind = LambdaSpec::Kind::TimesLambdaMin;
    else if (sym == "lambda_max") ls.kind = LambdaSpec::Kind::TimesLambdaMax;
    else throw ConfigError("lambda: unknown symbol '" + sym + "'");
    return ls;
  }
  ls.kind = LambdaSpec::Kind::Numeric;
  ls.value = parse_double(s, "lambda");
  return ls;
}

InitSpec parse_init(const std::string& spec) {
  InitSpec is;
  const auto toks = split_ws(spec);
  if (toks.empty()) throw ConfigError("v0: empty initial data spec");
  const std::string& head = toks[0];
  if (head == "eps*psi_min" ||
      (head.size() > 8 && head.substr(head.size() - 8) == "*psi_min")) {
    is.kind = InitSpec::Kind::EpsPsiMin;
    if (head != "eps*psi_min")
      is.eps = parse_double(head.substr(0, head.size() - 8), "v0 eps");
    for (const auto& [k, v] : tail_params(toks, "v0"))
      if (k == "eps") is.eps = parse_double(v, "v0 eps");
      else throw ConfigError("v0: unknown parameter '" + k + "'");
    if (!(is.eps > 0.0)) throw ConfigError("v0: eps must be positive");
    return is;
  }
  if (head.rfind("random_positive", 0) == 0) {
    is.kind = InitSpec::Kind::RandomPositive;
    const auto lp = head.find('(');
    if (lp != std::string::npos) {
      const auto rp = head.find(')');
      if (rp == std::string::npos || rp < lp) throw ConfigError("v0: malformed random_positive(seed)");
      is.seed = static_cast<std::uint64_t>(parse_int(head.substr(lp + 1, rp - lp - 1), "v0 seed"));
    }
    for (const auto& [k, v] : tail_params(toks, "v0"))
      if (k == "seed") is.seed = static_cast<std::uint64_t>(parse_int(v, "v0 seed"));
      else throw ConfigError("v0: unknown parameter '" + k + "'");
    return is;
  }
  if (head == "file") {
    if (toks.size() != 2) throw ConfigError("v0: expected 'file <path>'");
    is.kind = InitSpec::Kind::File;
    is.path = toks[1];
    return is;
  }
  if (head.rfind("file:", 0) == 0) {
    is.kind = InitSpec::Kind::File;
    is.path = head.substr(5);
    return is;
  }
  throw ConfigError("v0: unknown initial data spec '" + head + "'");
}

}  // namespace

double LambdaSpec::resolve(const Thresholds& th) const {
  switch (kind) {
    case Kind::Numeric:
      return value;
    case Kind::TimesLambdaMin:
      return value * th.lambda_min;
    case Kind::TimesLambdaMax:
      if (!th.lambda_max_finite())
        throw ConfigError("lambda: cannot scale lambda_max, it is infinite for this g");
      return value * th.lambda_max;
    case Kind::Mid:
      return th.lambda_max_finite() ? 0.5 * (th.lambda_min + th.lambda_max)
                                    : 2.0 * th.lambda_min;
  }
  throw ConfigError("lambda: unresolved spec");
}

void ExperimentConfig::validate() const {
  if (!(p > std::max(2.0, static_cast<double>(dim))))
    throw ConfigError("config: p must exceed max{2,N} (N = dim)");
  solver.validate();
  step.validate();
  Point origin{};
  if (!(g.g0(origin) > g.ginf(origin) && g.ginf(origin) >= 0.0))
    throw ConfigError("config: nonlinearity must satisfy g0 > ginf >= 0");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "dim") cfg.dim = static_cast<int>(parse_int(value, "dim"));
    else if (key == "n") {
      cfg.n.clear();
      std::string v = value;
      for (char& ch : v)
        if (ch == ',' || ch == 'x') ch = ' ';
      for (const auto& tok : split_ws(v))
        cfg.n.push_back(static_cast<int>(parse_int(tok, "n")));
    } else if (key == "p") cfg.p = parse_double(value, "p");
    else if (key == "g") cfg.g = parse_nonlinearity(value);
    else if (key == "lambda") cfg.lambda = parse_lambda(value);
    else if (key == "v0") cfg.v0 = parse_init(value);
    else if (key == "w0") cfg.w0 = parse_init(value);
    else if (key == "tol_residual") cfg.solver.tol_residual = parse_double(value, key);
    else if (key == "max_iter") cfg.solver.max_iter = static_cast<int>(parse_int(value, key));
    else if (key == "damping") cfg.solver.damping = parse_double(value, key);
    else if (key == "eps_jacobian") cfg.solver.eps_jacobian = parse_double(value, key);
    else if (key == "dt_init") cfg.step.dt_init = parse_double(value, key);
    else if (key == "dt_min") cfg.step.dt_min = parse_double(value, key);
    else if (key == "dt_max") cfg.step.dt_max = parse_double(value, key);
    else if (key == "blowup_threshold") cfg.step.blowup_threshold = parse_double(value, key);
    else if (key == "T") cfg.step.horizon = parse_double(value, key);
    else if (key == "stationarity_tol") cfg.step.stationarity_tol = parse_double(value, key);
    else if (key == "out") cfg.out_path = value;
    else if (key == "weight") cfg.weight_spec = value;
    else if (key == "schedule") cfg.schedule_spec = value;
    else if (key == "delta") cfg.delta = parse_double(value, key);
    else if (key == "gamma_scale") cfg.gamma_scale = parse_double(value, key);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  if (cfg.n.size() != static_cast<std::size_t>(cfg.dim)) {
    if (cfg.n.size() == 1 && cfg.dim == 2) cfg.n.push_back(cfg.n[0]);
    else if (cfg.n.size() > static_cast<std::size_t>(cfg.dim))
      throw ConfigError("config: more node counts than dimensions");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  return config_from_map(parse_key_values(text));
}

GridFunction random_positive(const Grid& grid, std::uint64_t seed) {
  // splitmix64; bit-for-bit deterministic across platforms
  GridFunction out(grid);
  std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL;
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    out[k] = 0.05 + std::ldexp(static_cast<double>(z >> 11), -53);
  }
  return out;
}

GridFunction resolve_initial_data(const InitSpec& spec, const Grid& grid,
                                  const GridFunction& psi_min) {
  switch (spec.kind) {
    case InitSpec::Kind::EpsPsiMin: {
      GridFunction v = psi_min;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] *= spec.eps;
      return v;
    }
    case InitSpec::Kind::RandomPositive:
      return random_positive(grid, spec.seed);
    case InitSpec::Kind::File: {
      const auto rows = read_csv(spec.path);
      if (rows.size() != grid.num_nodes())
        throw ConfigError("v0 file: row count does not match grid node count");
      GridFunction v(grid);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].empty()) throw ConfigError("v0 file: empty row");
        v[k] = rows[k].back();
      }
      return v;
    }
  }
  throw ConfigError("v0: unresolved initial data spec");
}

}  // namespace plapflow
