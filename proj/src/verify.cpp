#include "g2roll/verify.hpp"

#include "g2roll/g2alg.hpp"
#include "g2roll/numcheck.hpp"
#include "g2roll/rolling.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace g2roll {

std::vector<Params> RunConfig::default_sweep() {
  return {Params(0, 1), Params(1, 1), Params(2, 1), Params(-1, 2)};
}

std::vector<Params> parse_sweep(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ConfigError("sweep: expected a non-empty JSON array");
  std::vector<Params> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("kappa") || !e.contains("c"))
      throw ConfigError("sweep: each entry needs \"kappa\" and \"c\"");
    auto rat = [&](const char* key) -> Rational {
      const auto& v = e.at(key);
      try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long>());
      } catch (const std::exception& ex) {
        throw ConfigError(std::string("sweep: bad ") + key + ": " + ex.what());
      }
      throw ConfigError(std::string("sweep: ") + key + " must be a string \"p/q\" or an integer");
    };
    const Rational alpha = e.contains("alpha") ? rat("alpha") : Rational(0);
    try {
      out.emplace_back(rat("kappa"), rat("c"), alpha);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("sweep: ") + ex.what());
    }
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"growth", "g2", "sl3", "flatness", "ode", "gauss", "symmetry"};
  return names;
}

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

struct Sink {
  std::vector<CheckResult> results;
  std::string suite, params;
  void add(std::string check, bool pass, std::string detail = {}) {
    results.push_back({suite, std::move(check), params, pass, std::move(detail)});
  }
  /// Runs body; an exception counts as a failure of the named check.
  void guard(const std::string& check, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(check, false, std::string("error: ") + e.what());
    }
  }
};

SamplingOptions sampling(const RunConfig& cfg) {
  SamplingOptions o;
  o.seed = cfg.seed;
  return o;
}

LieAlgebra main_algebra(const Params& p, const RunConfig& cfg) {
  const auto S = an_generators(p);
  return generate_g2(S[0], S[1], S[2], main_chart(), sampling(cfg));
}

LieAlgebra c_algebra(const RunConfig& cfg) {
  const auto S = cdist_generators();
  return generate_g2(S[0], S[1], S[2], c_chart(), sampling(cfg));
}

bool all_zero_pairings(const std::vector<OneForm>& forms, const std::vector<VectorField>& fields) {
  for (const auto& w : forms)
    for (const auto& v : fields)
      if (!pair(w, v).is_zero()) return false;
  return true;
}

bool theta_identities_hold(const AnChart& a) {
  const Params& p = a.params;
  const Expr six_c3 = parse("6*c^3", p);
  const Expr s = parse("h*sin(psi)*(kappa*c^2 - h^2)", p);
  const Expr c = parse("h*cos(psi)*(kappa*c^2 - h^2)", p);
  const Expr t3 = parse("-(h^2 - kappa*c^2)", p);
  return a.Theta[0] == six_c3 * a.omega[0] + s * a.omega[2] && a.Theta[1] == six_c3 * a.omega[1] + c * a.omega[2] &&
         a.Theta[2] == t3 * a.omega[2];
}

bool engel_identities_hold(const AnChart& a) {
  const Chart& R = r_chart();
  auto r = [&](const char* id) { return a.rmap.images[idx(R.slot(id))]; };
  auto d = [](const Expr& e) { return OneForm::differential(e); };
  const Expr r1 = r("r1"), r2 = r("r2"), r3 = r("r3"), r4 = r("r4"), r5 = r("r5");
  const Rational half(1, 2);
  return d(r3) + r1 * d(r2) - r2 * d(r1) == a.Theta[2] &&
         d(r4) + half * (r3 * d(r1) - r1 * d(r3)) == half * a.Theta[1] &&
         d(r5) + half * (r2 * d(r3) - r3 * d(r2)) == half * a.Theta[0];
}

void write_jsonl(const RunConfig& cfg, const std::string& file, const std::vector<CurvatureReport>& reports) {
  if (cfg.out.empty()) return;
  std::filesystem::create_directories(cfg.out);
  std::ofstream os(std::filesystem::path(cfg.out) / file);
  for (const auto& r : reports) os << to_json_line(r) << '\n';
}

// ---------------------------------------------------------------------------
// Suites. Each returns its checks for one sweep entry; `p == nullptr` runs the
// parameter-free checks.

void growth_suite(Sink& s, const Params* p, const RunConfig& cfg) {
  if (!p) {
    s.guard("sphere growth (2,3,5)", [&] {
      const auto pts = generic_profile_points(sphere_profile(), 0.2, 1.4, cfg.points, cfg.seed);
      const auto g = growth_vector(sphere_profile(), pts, Exec::Parallel);
      const auto ok = std::count_if(g.begin(), g.end(), [](const GrowthResult& r) { return r.is_235(); });
      s.add("sphere growth (2,3,5)", ok == static_cast<long>(g.size()),
            std::to_string(ok) + "/" + std::to_string(g.size()) + " points");
    });
    s.guard("flat profile h=x degenerates", [&] {
      const auto pts = generic_points(Params(0, 1), 10, cfg.seed);
      const auto g = growth_vector(flat_profile(), pts, Exec::Parallel);
      const bool ok = std::all_of(g.begin(), g.end(), [](const GrowthResult& r) { return r.ranks[2] < 5; });
      s.add("flat profile h=x degenerates", ok,
            "ranks (" + std::to_string(g[0].ranks[0]) + "," + std::to_string(g[0].ranks[1]) + "," +
                std::to_string(g[0].ranks[2]) + ")");
    });
    return;
  }
  const AnChart chart = build_chart(*p);
  s.guard("annihilation", [&] {
    const std::vector<OneForm> omegas(chart.omega.begin(), chart.omega.begin() + 3);
    const std::vector<VectorField> X(chart.X.begin(), chart.X.end());
    const auto S = an_generators(*p);
    const std::vector<OneForm> thetas(chart.Theta.begin(), chart.Theta.end());
    const bool ok = all_zero_pairings(omegas, X) && all_zero_pairings(thetas, X) &&
                    all_zero_pairings(thetas, {S[0], S[1]});
    s.add("annihilation", ok, "omega_1..3(X^j), Theta_k(X^j), Theta_k(S^1, S^2) exact");
  });
  s.guard("growth (2,3,5)", [&] {
    const auto g = growth_vector(chart, generic_points(*p, cfg.points, cfg.seed), Exec::Parallel);
    const auto ok = std::count_if(g.begin(), g.end(), [](const GrowthResult& r) { return r.is_235(); });
    s.add("growth (2,3,5)", ok == static_cast<long>(g.size()),
          std::to_string(ok) + "/" + std::to_string(g.size()) + " points");
  });
}

void g2_suite(Sink& s, const Params* p, const RunConfig& cfg) {
  if (!p) {
    s.guard("c-chart g2", [&] {
      const LieAlgebra g = c_algebra(cfg);
      s.add("c-chart g2", g.basis.size() == 14 && jacobi_holds(g.structure),
            "dim=" + std::to_string(g.basis.size()));
    });
    return;
  }
  s.guard("generation", [&] {
    const LieAlgebra g = main_algebra(*p, cfg);
    const bool jac = jacobi_holds(g.structure), anti = is_antisymmetric(g.structure);
    const QMatrix B = killing_form(g.structure);
    const Signature sig = signature(B);
    std::ostringstream d;
    d << "dim=" << g.basis.size() << ", Jacobi=" << (jac ? 0 : 1) << ", signature=(" << sig.positive << ","
      << sig.negative << ")";
    s.add("generation", g.basis.size() == 14 && jac && anti && sig.positive == 8 && sig.negative == 6 &&
                            sig.zero == 0,
          d.str());

    const RootDatum rd = root_decomposition(g);
    std::ostringstream r;
    r << rd.roots.size() << " roots, " << rd.antipodal.size() << " antipodal pairs, long/short "
      << rd.long_short_ratio.get_str() << ", angle defect " << sci(rd.max_angle_defect);
    s.add("root system", rd.roots.size() == 12 && rd.antipodal.size() == 6 && rd.long_short_ratio == 3 &&
                             rd.n_long == 6 && rd.n_short == 6 && rd.max_angle_defect < 1e-10 &&
                             rd.exact_eigenvectors && rd.cartan_dim == 2 && rd.cartan_matrix.rows() == 2,
          r.str());

    const auto H = listed_cartan(*p);
    s.add("listed H1, H2", g.field("H1") == H[0] && g.field("H2") == H[1]);
    if (p->kappa == 0 && p->c == 1) {
      const auto listed = listed_c1k0();
      std::string bad;
      for (const auto& f : listed)
        if (g.field(f.name) != f.field) bad += f.name + " ";
      s.add("listed fields (c=1, kappa=0)", bad.empty(), bad.empty() ? "14/14 verbatim" : "differs: " + bad);
    }
    const LieAlgebra gc = c_algebra(cfg);
    s.add("c-chart structure constants", gc.structure == g.structure);
  });
}

void sl3_suite(Sink& s, const Params* p, const RunConfig& cfg) {
  if (!p) {
    s.guard("restriction to c3=0", [&] {
      const LieAlgebra gc = c_algebra(cfg);
      const Sl3Data d = sl3_restrict(gc, sampling(cfg));
      const auto listed = listed_sl3_c3zero();
      bool same = listed.size() == d.fields.size();
      for (std::size_t i = 0; same && i < listed.size(); ++i) same = listed[i].field == d.fields[i];
      std::vector<std::size_t> idx;
      for (const auto& n : d.names) idx.push_back(gc.index(n));
      const auto sub = restrict_structure(gc.structure, idx);
      s.add("restriction to c3=0", same && sub && *sub == d.structure,
            same ? "8 listed fields, sl3 structure constants" : "fields differ from the list");
    });
    return;
  }
  const AnChart chart = build_chart(*p);
  s.guard("iota* gtilde = 0", [&] {
    s.add("iota* gtilde = 0", pullback_metric(chart.iota, chart.gtilde).is_zero());
  });
  s.guard("projection", [&] {
    const LieAlgebra g = main_algebra(*p, cfg);
    const Sl3Data d = project_to_plane_circle(g, chart, sampling(cfg));
    std::vector<std::size_t> idx;
    for (const auto& n : d.names) idx.push_back(g.index(n));
    const auto sub = restrict_structure(g.structure, idx);
    const bool structure_ok = sub && *sub == d.structure;
    if (p->c == 1) {
      const auto listed = listed_sl3_projected();
      bool same = listed.size() == d.fields.size();
      for (std::size_t i = 0; same && i < listed.size(); ++i) same = listed[i].field == d.fields[i];
      s.add("projection", same && structure_ok, same ? "listed fields reproduced" : "fields differ from the list");
    } else {
      s.add("projection", structure_ok, "structure constants preserved");
    }
  });
}

void flatness_suite(Sink& s, const Params* p, const RunConfig& cfg, std::size_t sweep_index) {
  const std::size_t weyl_points = std::min<std::size_t>(cfg.points, 10);
  if (!p) {
    s.guard("flat metric Weyl", [&] {
      const auto r = weyl_at(flat_engel_metric(), Point{0.3, -0.2, 0.7, 1.1, 0.4});
      s.add("flat metric Weyl", r.max_weyl < 1e-8, "max|C| " + sci(r.max_weyl));
    });
    s.guard("sphere example not conformally flat", [&] {
      const auto sp = sphere_profile();
      const auto pts = generic_profile_points(sp, 0.2, 1.4, weyl_points, cfg.seed);
      const auto rs = weyl_sweep(general_metric(sp, "sphere"), pts, Exec::Parallel);
      write_jsonl(cfg, "weyl_sphere.jsonl", rs);
      double lo = 1e300;
      for (const auto& r : rs) lo = std::min(lo, r.relative_weyl);
      s.add("sphere example not conformally flat", lo > 1e-2, "min relative |C| " + sci(lo));
    });
    s.guard("conformal invariance", [&] {
      const auto sp = sphere_profile();
      const auto m = general_metric(sp, "sphere");
      const auto omega = [](const Point& x) { return 1 + 0.3 * x[idx(Coord::H)]; };
      const auto mr = conformal_rescale(m, omega);
      double worst = 0;
      for (const auto& pt : generic_profile_points(sp, 0.2, 1.4, 3, cfg.seed + 1)) {
        const auto a = weyl_at(m, pt), b = weyl_at(mr, pt);
        const double w2 = omega(pt) * omega(pt);
        double err = 0, mx = 0;
        for (std::size_t i = 0; i < a.weyl.size(); ++i) {
          err = std::max(err, std::abs(b.weyl[i] - w2 * a.weyl[i]));
          mx = std::max(mx, std::abs(w2 * a.weyl[i]));
        }
        worst = std::max(worst, err / mx);
      }
      s.add("conformal invariance", worst < 1e-5, "C -> Omega^2 C to " + sci(worst));
    });
    return;
  }
  const AnChart chart = build_chart(*p);
  s.guard("Theta identities", [&] {
    s.add("Theta identities", theta_identities_hold(chart),
          "Theta_1,2 = 6c^3 omega_1,2 + h (sin, cos)(kappa c^2 - h^2) omega_3, Theta_3 = -(h^2 - kappa c^2) omega_3");
    s.add("Engel identities", engel_identities_hold(chart), "r-chart forms reproduce Theta_3, Theta_2/2, Theta_1/2");
  });
  s.guard("exact conformal flatness", [&] {
    const Expr factor = parse("6*c^6/(kappa*c^2 - h^2)", *p);
    const SymTensor lhs = pullback_metric(chart.rmap, engel_flat_metric());
    s.add("exact conformal flatness", lhs == factor * chart.gtilde,
          "pullback(flat) = (6c^6/(kappa c^2 - h^2)) gtilde");
  });
  s.guard("numeric Weyl", [&] {
    const auto rs = weyl_sweep(an_metric(chart), generic_points(*p, weyl_points, cfg.seed), Exec::Parallel);
    write_jsonl(cfg, "weyl_" + std::to_string(sweep_index) + ".jsonl", rs);
    double worst = 0, asym = 0;
    for (const auto& r : rs) {
      worst = std::max(worst, r.relative_weyl);
      asym = std::max(asym, r.riemann_asymmetry);
    }
    s.add("numeric Weyl", worst < 1e-6 && asym < 1e-6,
          "max relative |C| " + sci(worst) + ", Riemann asymmetry " + sci(asym));
  });
}

void ode_suite(Sink& s, const Params* p, const RunConfig& cfg) {
  if (!p) {
    s.guard("sphere profile", [&] {
      const auto sp = sphere_profile();
      // The profile ODE residual is exactly -3 sin^3 x; x is kept where |sin x| > 0.6.
      double lam = 0, mu = 0, rel = 0, fails = 1e300;
      for (double x : {0.7, 1.1, 1.6, 1.9, 2.4}) {
        const LambdaMu lm = lambda_mu(sp, x);
        const double h = std::sin(x), h2 = -std::sin(x);
        lam = std::max(lam, std::abs(lm.lambda + 3 * std::pow(std::sin(x), 3)));
        mu = std::max(mu, std::abs(lm.mu));
        rel = std::max(rel, std::abs(3 * h * h2 * h2 + lm.lambda));
        fails = std::min(fails, profile_ode_residual(sp, {x}));
      }
      s.add("sphere profile", lam < 1e-10 && mu < 1e-10 && rel < 1e-10 && fails > 0.1,
            "lambda = -3 sin^3 to " + sci(lam) + ", mu to " + sci(mu) + ", 3hh''^2 + lambda to " + sci(rel) +
                ", min residual " + sci(fails));
    });
    return;
  }
  s.guard("ode residual", [&] {
    const OdeReport r = ode_residual(*p, cfg.points, cfg.seed);
    s.add("ode residual", r.max_rel_residual < 1e-9,
          "max residual " + sci(r.max_rel_residual) + " (relative), " + sci(r.max_abs_residual) + " (absolute)");
    s.add("first integrals", r.max_I1_error < 1e-8 && r.max_I2_error < 1e-8,
          "I1 " + sci(r.max_I1_error) + ", I2 " + sci(r.max_I2_error));
  });
}

void gauss_suite(Sink& s, const Params* p, const RunConfig&) {
  if (!p) {
    s.guard("plane and sphere", [&] {
      double plane = 0, sphere = 0;
      for (double u : {0.4, 0.9, 1.3}) {
        plane = std::max(plane, std::abs(gauss_curvature(plane_metric(), u)));
        sphere = std::max(sphere, std::abs(gauss_curvature(profile_metric(sphere_profile()), u) - 1));
      }
      s.add("plane", plane < 1e-8, "|K| " + sci(plane));
      s.add("unit sphere", sphere < 1e-8, "|K - 1| " + sci(sphere));
    });
    return;
  }
  s.guard("An-Nurowski surface", [&] {
    const double kc2 = p->kappa.get_d() * p->c.get_d() * p->c.get_d();
    const double pole = std::sqrt(std::max(kc2, 0.0));
    double worst = 0;
    for (double h : {0.6, 0.8, 1.2, 1.45}) {
      if (std::abs(h - pole) < 0.15) continue;  // K blows up at h^2 = kappa c^2
      const double exact = an_nurowski_gauss_curvature(*p, h);
      const double num = gauss_curvature(an_nurowski_surface_metric(*p), h);
      worst = std::max(worst, std::abs(num - exact) / std::max(1.0, std::abs(exact)));
    }
    s.add("An-Nurowski surface", worst < 1e-8, "K = -8c^6/(kappa c^2 - h^2)^3 to " + sci(worst));
  });
}

void symmetry_suite(Sink& s, const Params* p, const RunConfig& cfg) {
  if (!p) {
    s.guard("phi map", [&] {
      const DihedralReport d = dihedral_check(cfg.seed, 100);
      s.add("phi^6 = id", d.phi6_identity && d.phi_order == 6,
            std::to_string(d.checked) + " points, order " + std::to_string(d.phi_order));
      s.add("conformal rescaling identity", d.rescaling_identity);
      std::string detail = d.point_group_finite
                               ? "point group order " + std::to_string(d.point_group_order)
                               : "point group exceeds " + std::to_string(d.group_bound) + " maps";
      detail += "; group on long-root lines of order " + std::to_string(d.root_group_order);
      s.add("dihedral group of order 12", d.point_group_finite && d.point_group_order == 12, detail);
    });
    return;
  }
  s.guard("distribution symmetries", [&] {
    const AnChart chart = build_chart(*p);
    const LieAlgebra g = main_algebra(*p, cfg);
    std::string bad;
    for (std::size_t i = 0; i < g.basis.size(); ++i)
      if (!symmetry_check(g.basis[i], chart)) bad += g.names[i] + " ";
    s.add("basis fields preserve D", bad.empty(), bad.empty() ? "14/14" : "not preserving: " + bad);
    s.add("d_h does not preserve D", !symmetry_check(VectorField::coordinate(Coord::H), chart));
  });
}

using SuiteFn = std::function<void(Sink&, const Params*, const RunConfig&, std::size_t)>;

SuiteFn suite_fn(std::string_view name) {
  if (name == "growth") return [](Sink& s, const Params* p, const RunConfig& c, std::size_t) { growth_suite(s, p, c); };
  if (name == "g2") return [](Sink& s, const Params* p, const RunConfig& c, std::size_t) { g2_suite(s, p, c); };
  if (name == "sl3") return [](Sink& s, const Params* p, const RunConfig& c, std::size_t) { sl3_suite(s, p, c); };
  if (name == "flatness") return flatness_suite;
  if (name == "ode") return [](Sink& s, const Params* p, const RunConfig& c, std::size_t) { ode_suite(s, p, c); };
  if (name == "gauss") return [](Sink& s, const Params* p, const RunConfig& c, std::size_t) { gauss_suite(s, p, c); };
  if (name == "symmetry")
    return [](Sink& s, const Params* p, const RunConfig& c, std::size_t) { symmetry_suite(s, p, c); };
  throw ConfigError("unknown suite '" + std::string(name) + "'");
}

}  // namespace

std::vector<CheckResult> run_verify(std::string_view selector, const RunConfig& cfg) {
  std::vector<std::string> suites;
  if (selector == "all") suites = suite_names();
  else {
    (void)suite_fn(selector);
    suites.emplace_back(selector);
  }
  for (const auto& p : cfg.sweep)
    if (p.c == 0) throw ConfigError("c must be nonzero");
  std::vector<CheckResult> out;
  for (const auto& name : suites) {
    const SuiteFn fn = suite_fn(name);
    // Parameter-free checks first, then one task per sweep entry, assembled in sweep order.
    Sink base{{}, name, "-"};
    fn(base, nullptr, cfg, 0);
    out.insert(out.end(), base.results.begin(), base.results.end());
    std::vector<Sink> per(cfg.sweep.size());
    const auto n = static_cast<std::ptrdiff_t>(cfg.sweep.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      per[k].suite = name;
      per[k].params = cfg.sweep[k].str();
      fn(per[k], &cfg.sweep[k], cfg, k);
    }
    for (const auto& s : per) out.insert(out.end(), s.results.begin(), s.results.end());
  }
  return out;
}

std::string format_results(const std::vector<CheckResult>& results, Format format, bool reproducible) {
  std::ostringstream os;
  std::string stamp;
  if (!reproducible) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    stamp = buf;
  }
  const auto failed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return !r.pass; });
  switch (format) {
    case Format::Text:
      if (!stamp.empty()) os << "# generated " << stamp << '\n';
      for (const auto& r : results) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.suite << "  " << r.check << "  [" << r.params << "]";
        if (!r.detail.empty()) os << "  " << r.detail;
        os << '\n';
      }
      os << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
      break;
    case Format::Json: {
      nlohmann::ordered_json j;
      if (!stamp.empty()) j["generated"] = stamp;
      j["passed"] = results.size() - static_cast<std::size_t>(failed);
      j["failed"] = failed;
      j["checks"] = nlohmann::ordered_json::array();
      for (const auto& r : results)
        j["checks"].push_back(
            {{"suite", r.suite}, {"check", r.check}, {"params", r.params}, {"pass", r.pass}, {"detail", r.detail}});
      os << j.dump(2) << '\n';
      break;
    }
    case Format::Csv: {
      auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
      };
      os << "suite,check,params,status,detail\n";
      for (const auto& r : results)
        os << r.suite << ',' << quote(r.check) << ',' << quote(r.params) << ',' << (r.pass ? "PASS" : "FAIL") << ','
           << quote(r.detail) << '\n';
      break;
    }
  }
  return os.str();
}

}  // namespace g2roll
