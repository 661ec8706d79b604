#include "opmod/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "opmod/csv.hpp"
#include "opmod/fourier.hpp"
#include "opmod/holder.hpp"
#include "opmod/json_io.hpp"
#include "opmod/lattice.hpp"
#include "opmod/moduli.hpp"
#include "opmod/schur.hpp"

namespace opmod::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kSubcommands = {
    "multnorm",  "fourier-check", "lattice-bound", "omega",
    "doi-check", "search-extremal", "holder",      "mcc-check"};

std::string resolve_out_dir(const ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("OPMOD_OUT_DIR")) return env;
  return ".";
}

moduli::ModulusSpec parse_modulus(const std::string& s) {
  if (s == "linear" || s == "t") return moduli::ModulusSpec::linear();
  if (s.rfind("power:", 0) == 0) return moduli::ModulusSpec::power(std::stod(s.substr(6)));
  if (s.rfind("bounded:", 0) == 0) {
    const auto rest = s.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("modulus bounded:alpha,cap needs two parameters");
    return moduli::ModulusSpec::bounded_power(std::stod(rest.substr(0, comma)),
                                              std::stod(rest.substr(comma + 1)));
  }
  throw std::invalid_argument("unknown modulus spec: " + s);
}

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int run_multnorm(const ExperimentConfig& cfg, const std::string& dir) {
  ComplexMatrix phi = io::matrix_from_json(io::load_json(cfg.matrix_file));
  schur::MultiplierEstimate est = schur::estimate(phi, cfg.budget, cfg.iterations, cfg.seed);
  schur::validate(est, phi);
  CsvWriter csv(dir + "/multnorm.csv");
  csv.header({"rows", "cols", "lower", "upper"});
  csv.line({CsvWriter::num(static_cast<double>(phi.rows())),
            CsvWriter::num(static_cast<double>(phi.cols())), CsvWriter::num(est.lower),
            CsvWriter::num(est.upper)});
  if (est.lower_certificate)
    io::save_json(io::matrix_to_json(*est.lower_certificate), dir + "/multnorm_lower_cert.json");
  if (est.upper_certificate) {
    io::save_json(io::matrix_to_json(est.upper_certificate->x), dir + "/multnorm_upper_x.json");
    io::save_json(io::matrix_to_json(est.upper_certificate->y), dir + "/multnorm_upper_y.json");
  }
  std::cout << "multnorm: lower=" << CsvWriter::num(est.lower)
            << " upper=" << CsvWriter::num(est.upper) << "\n";
  return est.lower <= est.upper + 1e-8 ? kExitOk : kExitViolation;
}

struct FourierRow {
  std::string id;
  double err;
};

int run_fourier_check(const ExperimentConfig& cfg, const std::string& dir) {
  const double pi = 3.141592653589793238462643383280;
  fourier::GridSpec spec{cfg.grid_w, cfg.grid_n};
  std::vector<FourierRow> rows;

  auto mixed_error = [&](const fourier::PlanarGrid& g, auto&& exact, double rmax) {
    double worst = 0.0;
    for (std::size_t iy = 0; iy < g.n; ++iy)
      for (std::size_t ix = 0; ix < g.n; ++ix) {
        const cplx zeta = g.node(ix, iy);
        const double az = std::abs(zeta);
        if (az > rmax || az < 1e-14) continue;
        const cplx e = exact(zeta);
        worst = std::max(worst, std::abs(g.value(ix, iy) - e) / (1.0 + std::abs(e)));
      }
    return worst;
  };

  {
    fourier::FourierOptions opt;
    opt.kink_radii = {1.0};
    auto r = fourier::inverse_fourier_grid(
        [](cplx z) -> cplx { return std::abs(z) <= 1.0 ? 1.0 : 0.0; }, spec, opt);
    rows.push_back({"disc_indicator_J1",
                    mixed_error(r.grid,
                                [&](cplx zeta) -> cplx {
                                  return fourier::bessel_j(1, std::abs(zeta)) /
                                         (2.0 * pi * std::abs(zeta));
                                },
                                10.0)});
  }
  {
    fourier::FourierOptions opt;
    opt.kink_radii = {1.0};
    opt.tail = fourier::RadialTail{1, 1.0, 1.0};
    auto r = fourier::inverse_fourier_grid([](cplx z) { return fourier::psi(z); }, spec, opt);
    rows.push_back({"psi_J1",
                    mixed_error(r.grid,
                                [&](cplx zeta) -> cplx {
                                  const double az = std::abs(zeta);
                                  return cplx(0.0, 1.0) * fourier::bessel_j(1, az) /
                                         (pi * zeta * az);
                                },
                                10.0)});
  }
  {
    fourier::FourierOptions opt;
    opt.kink_radii = {1.0};
    opt.tail = fourier::RadialTail{2, 2.0, 1.0};
    auto r = fourier::inverse_fourier_grid(
        [](cplx z) {
          const cplx p = fourier::psi(z);
          return p * p;
        },
        spec, opt);
    rows.push_back({"psi_squared_J2",
                    mixed_error(r.grid,
                                [&](cplx zeta) -> cplx {
                                  return -2.0 * fourier::bessel_j(2, std::abs(zeta)) /
                                         (pi * zeta * zeta);
                                },
                                10.0)});
  }
  {
    // Gaussian sanity: e^{-|z|^2/2} -> (1/2pi) e^{-|zeta|^2/2}
    auto r = fourier::inverse_fourier_grid(
        [](cplx z) -> cplx { return std::exp(-0.5 * std::norm(z)); }, spec, {});
    rows.push_back({"gaussian_plancherel",
                    mixed_error(r.grid,
                                [&](cplx zeta) -> cplx {
                                  return std::exp(-0.5 * std::norm(zeta)) / (2.0 * pi);
                                },
                                10.0)});
  }

  CsvWriter csv(dir + "/fourier_check.csv");
  csv.header({"formula_id", "grid_W", "grid_N", "max_abs_error"});
  bool ok = true;
  for (const auto& row : rows) {
    csv.line({row.id, CsvWriter::num(cfg.grid_w), CsvWriter::num(static_cast<double>(cfg.grid_n)),
              CsvWriter::num(row.err)});
    std::cout << "fourier-check " << row.id << ": " << CsvWriter::num(row.err) << "\n";
    if (!(row.err <= 1e-3)) ok = false;
  }
  return ok ? kExitOk : kExitViolation;
}

int run_lattice_bound(const ExperimentConfig& cfg, const std::string& dir) {
  const FunctionSpec f = FunctionSpec::parse(cfg.function_id);
  std::vector<double> rs = cfg.r_grid.empty() ? std::vector<double>{cfg.disc_radius} : cfg.r_grid;
  CsvWriter csv(dir + "/lattice_bound.csv");
  csv.header({"r", "delta", "lower", "upper", "ratio"});
  bool ok = true;
  for (double r : rs) {
    double lower, upper;
    if (f.is_conjugate()) {
      const double rs_scaled = r / cfg.delta;
      lower = rs_scaled >= 3.0 ? lattice::niz_lower_bound(rs_scaled).bound : 0.0;
      upper = lattice::conj_upper_bound({cfg.delta, r, true});
    } else {
      std::vector<cplx> pts = lattice::lattice_points({cfg.delta, r, true});
      if (pts.size() > 340) pts.resize(340);
      lattice::DividedDifferenceMatrix dd = lattice::divided_difference(f, pts, pts);
      lower = schur::multiplier_lower(dd.matrix, cfg.budget, cfg.seed).lower;
      schur::MultiplierEstimate hi = schur::multiplier_upper(dd.matrix, cfg.iterations, cfg.seed);
      upper = std::isfinite(hi.upper) ? hi.upper
                                      : lattice::separated_set_bound(f, pts, cfg.delta);
    }
    if (lower > upper + 1e-8) ok = false;
    csv.line({CsvWriter::num(r), CsvWriter::num(cfg.delta), CsvWriter::num(lower),
              CsvWriter::num(upper), CsvWriter::num(upper > 0.0 ? lower / upper : 0.0)});
    std::cout << "lattice-bound r=" << r << " lower=" << CsvWriter::num(lower)
              << " upper=" << CsvWriter::num(upper) << "\n";
  }
  return ok ? kExitOk : kExitViolation;
}

int run_omega(const ExperimentConfig& cfg, const std::string& dir) {
  moduli::ModulusSpec omega = parse_modulus(cfg.modulus);
  std::vector<double> ds = cfg.delta_grid.empty() ? std::vector<double>{cfg.delta} : cfg.delta_grid;
  CsvWriter csv(dir + "/omega.csv");
  csv.header({"modulus", "delta", "omega_star", "omega_star_star"});
  for (double d : ds) {
    const double o1 = moduli::omega_transform(omega, d, 1);
    const double o2 = moduli::omega_transform(omega, d, 2);
    csv.line({omega.name(), CsvWriter::num(d), CsvWriter::num(o1), CsvWriter::num(o2)});
  }
  return kExitOk;
}

int run_doi_check(const ExperimentConfig& cfg, const std::string& dir) {
  const std::vector<std::string> fns = {"z", "conj", "z^2", "h1"};
  CsvWriter csv(dir + "/doi_check.csv");
  csv.header({"f", "instances", "dim_cap", "max_relative_residual"});
  double worst = 0.0;
  for (const auto& id : fns) {
    const FunctionSpec f = FunctionSpec::parse(id);
    double fworst = 0.0;
    for (std::size_t t = 0; t < cfg.instances; ++t) {
      Rng rng = Rng(cfg.seed).substream(t);
      const std::size_t d = 1 + rng.index(cfg.dim);
      std::vector<cplx> e1(d), e2(d);
      for (auto& e : e1) e = rng.disc_point(cfg.disc_radius);
      for (auto& e : e2) e = rng.disc_point(cfg.disc_radius);
      NormalOperator n1(e1, haar_unitary(d, rng));
      NormalOperator n2(e2, haar_unitary(d, rng));
      ComplexMatrix r(d, d);
      for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = rng.complex_normal();
      const ComplexMatrix doi = moduli::doi_quasicommutator(f, n1, n2, r);
      const ComplexMatrix direct = multiply(n1.apply(f), r) - multiply(r, n2.apply(f));
      const double resid = operator_norm(doi - direct) / (1.0 + operator_norm(direct));
      fworst = std::max(fworst, resid);
    }
    worst = std::max(worst, fworst);
    csv.line({id, CsvWriter::num(static_cast<double>(cfg.instances)),
              CsvWriter::num(static_cast<double>(cfg.dim)), CsvWriter::num(fworst)});
    std::cout << "doi-check " << id << ": max residual " << CsvWriter::num(fworst) << "\n";
  }
  return worst <= 1e-10 ? kExitOk : kExitViolation;
}

int run_search_extremal(const ExperimentConfig& cfg, const std::string& dir) {
  const FunctionSpec f = FunctionSpec::parse(cfg.function_id);
  const moduli::ModulusKind kind = moduli::kind_from_name(cfg.kind);
  std::vector<double> ds = cfg.delta_grid.empty() ? std::vector<double>{cfg.delta} : cfg.delta_grid;
  std::sort(ds.begin(), ds.end());
  std::vector<moduli::WitnessSample> samples;
  std::size_t widx = 0;
  for (double d : ds) {
    moduli::SearchConfig sc{cfg.disc_radius, cfg.dim, cfg.budget, cfg.seed};
    moduli::ModulusWitness w = moduli::modulus_search(kind, f, d, sc);
    w.f_id = cfg.function_id;
    if (kind == moduli::ModulusKind::C && f.is_conjugate() &&
        cfg.disc_radius > 2.0 * fourier::psi_constant().c * d) {
      moduli::ModulusWitness kw =
          moduli::kme_witness(f, d, cfg.disc_radius, std::max<std::size_t>(8, cfg.budget / 8),
                              cfg.seed);
      kw.f_id = cfg.function_id;
      if (kw.value > w.value && kw.delta <= d * (1.0 + 1e-9)) w = kw;
    }
    moduli::validate_witness(w);
    const std::string path = dir + "/witness_" + moduli::kind_name(kind) + "_" +
                             std::to_string(widx++) + ".json";
    io::save_json(io::witness_to_json(w), path);
    io::witness_from_json(io::load_json(path));  // emitted files must re-validate
    samples.push_back({w.delta, w.value, path});
  }
  moduli::ModulusEnvelope env = moduli::build_envelope(kind, samples, ds);
  CsvWriter csv(dir + "/envelope.csv");
  csv.header({"kind", "f", "delta", "value", "value_over_delta", "witness"});
  for (std::size_t i = 0; i < ds.size(); ++i)
    csv.line({moduli::kind_name(kind), cfg.function_id, CsvWriter::num(env.deltas[i]),
              CsvWriter::num(env.values[i]), CsvWriter::num(env.ratios[i]), env.provenance[i]});
  return kExitOk;
}

int run_holder(const ExperimentConfig& cfg, const std::string& dir) {
  const FunctionSpec f = FunctionSpec::parse(cfg.function_id);
  std::vector<double> alphas =
      cfg.alpha_grid.empty() ? std::vector<double>{0.5, 0.7, 0.9} : cfg.alpha_grid;
  CsvWriter csv(dir + "/holder.csv");
  csv.header({"alpha", "max_ratio", "instances", "r_cap", "seed"});
  for (double a : alphas) {
    holder::HolderConstantEstimate est =
        holder::holder_ratio_search(f, a, cfg.dim, cfg.budget, cfg.seed, cfg.disc_radius);
    csv.line({CsvWriter::num(a), CsvWriter::num(est.lower),
              CsvWriter::num(static_cast<double>(cfg.budget)), CsvWriter::num(cfg.disc_radius),
              CsvWriter::num(static_cast<double>(cfg.seed))});
    std::cout << "holder alpha=" << a << " ratio=" << CsvWriter::num(est.lower) << " ("
              << est.seminorm_method << " seminorm " << CsvWriter::num(est.holder_seminorm)
              << ")\n";
  }
  return kExitOk;
}

int run_mcc_check(const ExperimentConfig& cfg, const std::string& dir) {
  const FunctionSpec f = FunctionSpec::parse(cfg.function_id);
  moduli::DilationReport rep = moduli::mcc_sandwich_check(f, cfg.instances, cfg.dim, cfg.seed);
  moduli::VlReport vl = moduli::vl_check(cfg.instances, cfg.dim, cfg.seed);
  CsvWriter csv(dir + "/mcc_check.csv");
  csv.header({"f", "instances", "commutator_violations", "value_violations", "vl_violations"});
  csv.line({cfg.function_id, CsvWriter::num(static_cast<double>(rep.instances)),
            CsvWriter::num(static_cast<double>(rep.commutator_violations)),
            CsvWriter::num(static_cast<double>(rep.value_violations)),
            CsvWriter::num(static_cast<double>(vl.violations))});
  std::cout << "mcc-check: " << rep.commutator_violations << " commutator, "
            << rep.value_violations << " value, " << vl.violations << " square-root violations\n";
  return (rep.commutator_violations == 0 && rep.value_violations == 0 && vl.violations == 0)
             ? kExitOk
             : kExitViolation;
}

}  // namespace

ExperimentConfig config_from_json_file(const std::string& path) {
  io::json j = io::load_json(path);
  if (j.value("schema", "") != "opmod-config/1")
    throw std::invalid_argument("config: unknown or missing schema (want opmod-config/1)");
  ExperimentConfig cfg;
  cfg.subcommand = j.at("subcommand").get<std::string>();
  cfg.function_id = j.value("f", cfg.function_id);
  cfg.kind = j.value("kind", cfg.kind);
  cfg.alpha_grid = j.value("alpha_grid", cfg.alpha_grid);
  cfg.delta_grid = j.value("delta_grid", cfg.delta_grid);
  cfg.r_grid = j.value("r_grid", cfg.r_grid);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.disc_radius = j.value("r", cfg.disc_radius);
  cfg.dim = j.value("dim", cfg.dim);
  cfg.budget = j.value("budget", cfg.budget);
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.instances = j.value("instances", cfg.instances);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.grid_w = j.value("grid_w", cfg.grid_w);
  cfg.grid_n = j.value("grid_n", cfg.grid_n);
  cfg.matrix_file = j.value("matrix", cfg.matrix_file);
  cfg.modulus = j.value("modulus", cfg.modulus);
  cfg.out_dir = j.value("out", cfg.out_dir);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), cfg.subcommand) == kSubcommands.end())
    throw std::invalid_argument("unknown subcommand: " + cfg.subcommand);
  FunctionSpec::parse(cfg.function_id);  // throws on unknown ids
  moduli::kind_from_name(cfg.kind);
  if (cfg.subcommand == "omega") parse_modulus(cfg.modulus);
  if (cfg.subcommand == "multnorm" && cfg.matrix_file.empty())
    throw std::invalid_argument("multnorm needs --matrix");
  if (!(cfg.delta > 0.0) || !(cfg.disc_radius > 0.0))
    throw std::invalid_argument("delta and r must be positive");
  for (double a : cfg.alpha_grid)
    if (!(a > 0.0) || !(a < 1.0)) throw std::invalid_argument("alpha grid entries must lie in (0,1)");
  for (double d : cfg.delta_grid)
    if (!(d > 0.0)) throw std::invalid_argument("delta grid entries must be positive");
  for (double r : cfg.r_grid)
    if (!(r > 0.0)) throw std::invalid_argument("r grid entries must be positive");
  if (cfg.dim < 1 || cfg.dim > 64) throw std::invalid_argument("dim must lie in [1, 64]");
  if (cfg.budget < 1 || cfg.instances < 1 || cfg.iterations < 1)
    throw std::invalid_argument("budget, instances and iterations must be >= 1");
  if (!is_pow2(cfg.grid_n) || cfg.grid_n > 4096)
    throw std::invalid_argument("grid_n must be a power of two <= 4096");
  if (!(cfg.grid_w > 0.0)) throw std::invalid_argument("grid_w must be positive");
}

int run(const ExperimentConfig& cfg) {
  try {
    validate_config(cfg);
    if (cfg.subcommand == "multnorm")  // probe the input before creating artifacts
      io::matrix_from_json(io::load_json(cfg.matrix_file));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const std::string dir = resolve_out_dir(cfg);
    fs::create_directories(dir);
    if (cfg.subcommand == "multnorm") return run_multnorm(cfg, dir);
    if (cfg.subcommand == "fourier-check") return run_fourier_check(cfg, dir);
    if (cfg.subcommand == "lattice-bound") return run_lattice_bound(cfg, dir);
    if (cfg.subcommand == "omega") return run_omega(cfg, dir);
    if (cfg.subcommand == "doi-check") return run_doi_check(cfg, dir);
    if (cfg.subcommand == "search-extremal") return run_search_extremal(cfg, dir);
    if (cfg.subcommand == "holder") return run_holder(cfg, dir);
    if (cfg.subcommand == "mcc-check") return run_mcc_check(cfg, dir);
  } catch (const validation_error& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitConfig;
}

}  // namespace opmod::cli
