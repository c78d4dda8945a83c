// g2roll: verification suites, tables and the cubic solver on the command line.
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage or configuration error.

#include "g2roll/g2alg.hpp"
#include "g2roll/numcheck.hpp"
#include "g2roll/rolling.hpp"
#include "g2roll/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace g2roll;

struct Options {
  std::string kappa, c, alpha;
  std::string sweep_file;
  std::uint64_t seed = 20240611;
  std::size_t points = 50;
  std::string out;
  std::string format = "text";
  bool reproducible = false;
};

Format parse_format(const std::string& f) {
  if (f == "text") return Format::Text;
  if (f == "json") return Format::Json;
  if (f == "csv") return Format::Csv;
  throw ConfigError("unknown format '" + f + "'");
}

Rational rational_flag(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--") + flag + ": " + e.what());
  }
}

Params single_params(const Options& o) {
  const Rational kappa = o.kappa.empty() ? Rational(0) : rational_flag(o.kappa, "kappa");
  const Rational c = o.c.empty() ? Rational(1) : rational_flag(o.c, "c");
  const Rational alpha = o.alpha.empty() ? Rational(0) : rational_flag(o.alpha, "alpha");
  if (c == 0) throw ConfigError("--c must be nonzero");
  return Params(kappa, c, alpha);
}

RunConfig run_config(const Options& o) {
  RunConfig cfg;
  if (!o.sweep_file.empty()) {
    std::ifstream in(o.sweep_file);
    if (!in) throw ConfigError("cannot read sweep file " + o.sweep_file);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg.sweep = parse_sweep(ss.str());
  } else if (!o.kappa.empty() || !o.c.empty() || !o.alpha.empty()) {
    cfg.sweep = {single_params(o)};
  }
  cfg.seed = o.seed;
  if (o.points == 0) throw ConfigError("--points must be positive");
  cfg.points = o.points;
  cfg.out = o.out;
  cfg.format = parse_format(o.format);
  cfg.reproducible = o.reproducible;
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

int cmd_verify(const std::string& selector, const Options& o) {
  const RunConfig cfg = run_config(o);
  const auto results = run_verify(selector, cfg);
  const std::string report = format_results(results, cfg.format, cfg.reproducible);
  std::cout << report;
  if (!cfg.out.empty()) {
    const char* ext = cfg.format == Format::Json ? "json" : cfg.format == Format::Csv ? "csv" : "txt";
    write_file(std::filesystem::path(cfg.out) / (std::string("verify.") + ext), report);
  }
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}

int cmd_table(const std::string& kind, const Options& o) {
  const Params p = single_params(o);
  SamplingOptions so;
  so.seed = o.seed;
  const auto S = an_generators(p);
  const LieAlgebra g = generate_g2(S[0], S[1], S[2], main_chart(), so);
  const std::filesystem::path dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
  std::filesystem::path file;
  if (kind == "brackets") {
    file = dir / "brackets.json";
    write_file(file, brackets_json(g));
  } else if (kind == "killing") {
    file = dir / "killing.csv";
    write_file(file, killing_csv(killing_form(g.structure)));
  } else {
    file = dir / "roots.svg";
    write_file(file, root_svg(root_decomposition(g)));
  }
  std::cout << "wrote " << file.string() << '\n';
  return 0;
}

double x_value(const std::string& text) {
  try {
    if (text.find('/') != std::string::npos) return parse_rational(text).get_d();
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception& e) {
    throw ConfigError("--x: " + std::string(e.what()));
  }
}

std::string num(double v) {
  if (std::abs(v) < 1e-12) v = 0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_solve_h(const std::string& x_text, const Options& o) {
  const Params p = single_params(o);
  const double x = x_value(x_text);
  const Format format = parse_format(o.format);
  const CubicSolution sol = solve_h(p, x);
  const double kc2 = p.kappa.get_d() * p.c.get_d() * p.c.get_d();

  nlohmann::ordered_json j;
  j["x"] = x;
  j["params"] = p.str();
  j["roots"] = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "h^3 - 3 kappa c^2 h + 6 c^3 (x + alpha) = 0 at x = " << x_text << ", " << p.str() << '\n';
  for (std::size_t i = 0; i < sol.roots.size(); ++i) {
    const auto& r = sol.roots[i];
    nlohmann::ordered_json e{{"h", r.value}, {"multiplicity", r.multiplicity},
                             {"cubic_residual", sol.relative_residuals[i]}};
    text << "root " << num(r.value) << (r.multiplicity > 1 ? " (multiplicity " + std::to_string(r.multiplicity) + ")" : "");
    const bool singular = std::abs(kc2 - r.value * r.value) < 1e-9 || r.multiplicity > 1;
    if (singular) {
      e["generic"] = false;
      text << "  non-generic: h' is singular here\n";
    } else {
      const ProfileDerivatives d = an_nurowski_derivatives(p, r.value);
      const double res = ode_residual_at(r.value, d.d1, d.d2, d.d3);
      e["generic"] = true;
      e["ode_residual"] = res;
      text << "  h'=" << num(d.d1) << " h''=" << num(d.d2);
      try {
        const FirstIntegrals I = first_integrals(r.value, d.d1, d.d2, p);
        e["I1"] = I.I1;
        e["I2"] = I.I2;
        text << "  I1=" << num(I.I1) << " I2=" << num(I.I2);
      } catch (const DegenerateProfile&) {
        e["I1"] = nullptr;
        e["I2"] = nullptr;
        text << "  I1, I2 undefined (h'' = 0)";
      }
      text << "  residual=" << num(res) << '\n';
    }
    j["roots"].push_back(e);
  }
  if (format == Format::Json) std::cout << j.dump(2) << '\n';
  else std::cout << text.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* t = std::getenv("G2ROLL_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
  CLI::App app{"Exact and numeric checks of the maximally symmetric rolling distribution"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* c) {
    c->add_option("--kappa", o.kappa, "kappa as p/q");
    c->add_option("--c", o.c, "c as p/q (nonzero)");
    c->add_option("--alpha", o.alpha, "alpha as p/q");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--out", o.out, "output directory");
    c->add_option("--format", o.format, "text, json or csv");
    c->add_flag("--reproducible", o.reproducible, "suppress timestamps");
  };

  std::string selector;
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("suite", selector, "all, growth, g2, sl3, flatness, ode, gauss or symmetry")->required();
  verify->add_option("--sweep", o.sweep_file, "JSON file with [{\"kappa\": \"p/q\", \"c\": \"p/q\"}, ...]");
  verify->add_option("--points", o.points, "random points per check");
  common(verify);

  std::string kind;
  auto* table = app.add_subcommand("table", "write the bracket table, Killing form or root diagram");
  table->add_option("kind", kind, "brackets, killing or roots")
      ->required()
      ->check(CLI::IsMember({"brackets", "killing", "roots"}));
  common(table);

  std::string x_text;
  auto* solve = app.add_subcommand("solve-h", "real roots of the cubic and first-integral checks");
  solve->add_option("--x", x_text, "x as p/q or decimal")->required();
  common(solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(selector, o);
    if (*table) return cmd_table(kind, o);
    if (*solve) return cmd_solve_h(x_text, o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
