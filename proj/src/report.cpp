#include "clocksim/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

using nlohmann::json;

std::string bool01(bool b) { return b ? "1" : "0"; }

void append_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string format_shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<LevyFamily> representative_catalog() {
  return {
      make_family(BrownianDrift{1.0}),
      make_family(CpPosDrift{1.0, 2.0, 3.0}),
      make_family(CpNegDrift{3.0, 1.0}),
      make_family(SawTooth{1.0, 2.0}),
      make_family(ConditionedStable{1.5}),
      make_family(HypergeometricStable{1.0, 3.0}),
      make_family(Cbi{0.5, 0.9, 1.0}),
  };
}

std::string csv_cumulants(const std::vector<LevyFamily>& families) {
  std::string out;
  for (const auto& fam : families) {
    const Cumulants c = cumulants(fam);
    append_row(out, {std::string(fam.name()), format_shortest(fam.alpha),
                     "p=" + format_shortest(c.p),
                     "sigma2=" + format_shortest(c.sigma2),
                     "v2=" + format_shortest(c.v2)});
    const QuotedCumulants q = quoted_cumulants(fam);
    if (q.sigma2 && *q.sigma2 != c.sigma2) {
      out += "# " + std::string(fam.name()) +
             " quoted sigma2=" + format_shortest(*q.sigma2) +
             " differs from computed " + format_shortest(c.sigma2) + "\n";
    }
    if (q.v2 && *q.v2 != c.v2) {
      out += "# " + std::string(fam.name()) + " quoted v2=" + format_shortest(*q.v2) +
             " differs from computed " + format_shortest(c.v2) + "\n";
    }
  }
  return out;
}

std::string csv_test_report(const TestReport& report) {
  std::string out = "t,mean,var,se,target,pass\n";
  for (const auto& row : report.rows) {
    append_row(out, {format_shortest(row.t), format_shortest(row.mean),
                     format_shortest(row.var), format_shortest(row.se),
                     format_shortest(row.target), bool01(row.pass)});
  }
  return out;
}

std::string csv_covariance_matrix(const std::vector<double>& t_grid,
                                  const std::vector<std::vector<double>>& cov) {
  std::string out = "t";
  for (double t : t_grid) out += "," + format_shortest(t);
  out += '\n';
  for (std::size_t i = 0; i < cov.size(); ++i) {
    out += format_shortest(t_grid[i]);
    for (double c : cov[i]) out += "," + format_shortest(c);
    out += '\n';
  }
  return out;
}

std::string csv_iinf(const std::vector<IinfCheckRow>& rows) {
  std::string out = "family,alpha,n,mean_inv_Iinf,alpha_p,se,ks_p_closed_vs_mc\n";
  for (const auto& r : rows) {
    append_row(out, {r.family, format_shortest(r.alpha), std::to_string(r.n),
                     format_shortest(r.mean_inv_iinf), format_shortest(r.alpha_p),
                     format_shortest(r.se), format_shortest(r.ks_p_closed_vs_mc)});
  }
  return out;
}

std::string csv_mellin(const std::vector<MellinCheckRow>& rows) {
  std::string out = "family,z,residual,tolerance,pass\n";
  for (const auto& r : rows) {
    append_row(out, {r.family, format_shortest(r.z), format_shortest(r.residual),
                     format_shortest(r.tolerance), bool01(r.pass)});
  }
  return out;
}

std::string csv_ergodicity(
    const std::vector<std::pair<LevyFamily, ErgodicityVerdict>>& verdicts) {
  std::string out = "family,alpha,verdict,witness_m,C,K,D\n";
  for (const auto& [fam, v] : verdicts) {
    std::string verdict;
    switch (v.classification) {
      case ErgodicityClass::kExpErgodicVia2a: verdict = "exp_ergodic_via_2a"; break;
      case ErgodicityClass::kExpErgodicVia2b: verdict = "exp_ergodic_via_2b"; break;
      case ErgodicityClass::kCriterionFails: verdict = "criterion_fails"; break;
    }
    const std::string witness =
        v.witness_m ? format_shortest(*v.witness_m) : "nan";
    std::string c = "nan", k = "nan", d = "nan";
    if (v.lyapunov) {
      c = format_shortest(v.lyapunov->C);
      k = format_shortest(v.lyapunov->K);
      d = format_shortest(v.lyapunov->D);
    }
    append_row(out, {std::string(fam.name()), format_shortest(fam.alpha), verdict,
                     witness, c, k, d});
    if (v.lyapunov && !v.lyapunov->sweep_ok()) {
      out += "# " + std::string(fam.name()) + " drift-inequality sweep found " +
             std::to_string(v.lyapunov->violations.size()) +
             " violations (quoted constants inconsistent here)\n";
    }
  }
  return out;
}

std::string csv_path_dump(const PiecewiseLinearPath& path) {
  std::string out = "t,xi,slope,jump\n";
  for (std::size_t i = 0; i < path.knot_count(); ++i) {
    const double slope = i < path.segment_count() ? path.seg_slope(i) : 0.0;
    append_row(out, {format_shortest(path.knot_time(i)),
                     format_shortest(path.knot_value(i)), format_shortest(slope),
                     format_shortest(path.knot_jump(i))});
  }
  return out;
}

std::map<std::string, std::string> parse_flat_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                               ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string()
                                    : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                               ": empty key");
    }
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("config: repeated key '" + key + "'");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv_list) {
  std::vector<double> out;
  std::istringstream in(csv_list);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty entry in number list");
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    while (used < tok.size() && (tok[used] == ' ' || tok[used] == '\t')) ++used;
    if (used != tok.size()) {
      throw std::invalid_argument("bad number in list: '" + tok + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_shortest(values[i]);
  }
  return out;
}

std::map<std::string, std::string> config_to_flat(const ExperimentConfig& config) {
  std::map<std::string, std::string> flat;
  flat["family"] = format_family(config.family);
  flat["regime"] = regime_name(config.regime);
  flat["a"] = format_shortest(config.a);
  flat["logT"] = format_shortest(config.log_T);
  flat["tgrid"] = format_double_list(config.t_grid);
  flat["n"] = std::to_string(config.replicas);
  flat["seed"] = std::to_string(config.seed);
  flat["dt"] = format_shortest(config.dt);
  flat["workers"] = std::to_string(config.workers);
  return flat;
}

ExperimentConfig config_from_flat(const std::map<std::string, std::string>& flat) {
  ExperimentConfig config;
  for (const auto& [key, value] : flat) {
    if (key == "family") {
      config.family = parse_family(value);
    } else if (key == "regime") {
      if (value == "Qa") {
        config.regime = Regime::kQa;
      } else if (value == "Q0") {
        config.regime = Regime::kQ0;
      } else {
        throw std::invalid_argument("config: regime must be Qa or Q0, got '" +
                                 value + "'");
      }
    } else if (key == "a") {
      config.a = std::stod(value);
    } else if (key == "logT") {
      config.log_T = std::stod(value);
    } else if (key == "tgrid") {
      config.t_grid = parse_double_list(value);
    } else if (key == "n") {
      config.replicas = std::stoi(value);
    } else if (key == "seed") {
      config.seed = std::stoull(value);
    } else if (key == "dt") {
      config.dt = std::stod(value);
    } else if (key == "workers") {
      config.workers = std::stoi(value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return config;
}

std::string json_summary(const std::string& subcommand,
                         const ExperimentConfig& config, const TestReport& report,
                         double runtime_seconds) {
  json j;
  j["subcommand"] = subcommand;
  json cfg;
  for (const auto& [key, value] : config_to_flat(config)) cfg[key] = value;
  j["config"] = cfg;
  j["pass"] = report.all_pass();
  j["v2_target"] = report.v2_target;
  if (!std::isnan(report.ks_p_value)) {
    j["ks_statistic"] = report.ks_statistic;
    j["ks_p_value"] = report.ks_p_value;
  }
  j["notes"] = report.notes;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"t", r.t},
                    {"mean", r.mean},
                    {"var", r.var},
                    {"se", r.se},
                    {"target", r.target},
                    {"pass", r.pass}});
  }
  j["rows"] = rows;
  j["runtime_seconds"] = runtime_seconds;
  return j.dump(2) + "\n";
}

std::map<std::string, std::string> flat_config_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  if (!j.contains("config") || !j["config"].is_object()) {
    throw std::invalid_argument("JSON summary has no config object");
  }
  std::map<std::string, std::string> flat;
  for (const auto& [key, value] : j["config"].items()) {
    if (!value.is_string()) {
      throw std::invalid_argument("JSON config values must be strings");
    }
    flat[key] = value.get<std::string>();
  }
  return flat;
}

}  // namespace clocksim
