// Command-line front end: polynomial evaluation, kernel rows, composition,
// extended rows, path sampling, boundary approximation, and the verification
// suite. High-precision subcommands run on an MPFR tier selected by --digits
// (or the QGT_DIGITS environment variable); sampling runs in double.
//
// Exit codes: 0 success, 1 validation error, 2 verification failure.

#include "qgt/chain.hpp"
#include "qgt/json_io.hpp"
#include "qgt/kernels.hpp"
#include "qgt/lattice.hpp"
#include "qgt/macdonald.hpp"
#include "qgt/parallel.hpp"
#include "qgt/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using qgt::CounterRng;
using qgt::shapes::coord_t;
using qgt::shapes::Partition;
using qgt::shapes::Signature;

struct Options {
  int digits = 50;
  std::string q = "0.5";
  std::string t;
  int tau = 0;
  std::string zeta_plus = "1";
  std::string zeta_minus = "-1";
  std::string plus, minus;
  std::string nu;
  std::string points;
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::int64_t m_max = -1;
  int level = 0;
  int insert_a = 20;
  int n_approx = 0;
  int nu_max = 3;
  std::uint64_t paths = 1;
  std::string suite;
  std::string manifest;
  std::string plus_head, minus_head;
  std::string plus_tail = "none", minus_tail = "none";
  unsigned jobs = 0;
  bool runtime = false;
};

std::vector<coord_t> parse_int_list(const std::string& s) {
  std::vector<coord_t> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stoll(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  return out;
}

qgt::lattice::TailRule parse_tail(const std::string& s) {
  using K = qgt::lattice::TailRule::Kind;
  if (s == "none" || s.empty()) return {K::none, 0};
  if (s == "constant") return {K::constant, 0};
  if (s.rfind("arith:", 0) == 0) return {K::arithmetic, std::stoll(s.substr(6))};
  throw CLI::ValidationError("--*-tail must be none, constant, or arith:<step>");
}

void write_out(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
}

template <class Real>
qgt::qcalc::QPair<Real> qpair_of(const Options& o) {
  const Real q = qgt::parse_real<Real>(o.q);
  if (o.tau > 0) return qgt::qcalc::QPair<Real>::with_tau(q, o.tau);
  if (o.t.empty()) throw CLI::ValidationError("provide --t or --tau");
  return qgt::qcalc::QPair<Real>(q, qgt::parse_real<Real>(o.t));
}

template <class Real>
qgt::lattice::Params<Real> params_of(const Options& o) {
  return {qpair_of<Real>(o), qgt::parse_real<Real>(o.zeta_plus),
          qgt::parse_real<Real>(o.zeta_minus)};
}

qgt::lattice::Configuration config_of(const Options& o) {
  return qgt::lattice::Configuration(
      {Signature(parse_int_list(o.plus)), Signature(parse_int_list(o.minus))});
}

std::optional<coord_t> m_max_of(const Options& o) {
  if (o.m_max < 0) return std::nullopt;
  return o.m_max;
}

template <class Real>
int run_eval(const Options& o) {
  const auto qp = qpair_of<Real>(o);
  std::vector<Real> xs;
  std::string cur;
  for (char c : o.points + ",") {
    if (c == ',') {
      if (!cur.empty()) xs.push_back(qgt::parse_real<Real>(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const Real v = qgt::macdonald::eval(Partition(parse_int_list(o.nu)), xs, qp);
  write_out(o.output, qgt::to_decimal_string(v) + "\n");
  return 0;
}

template <class Real>
int run_kernel_row(const Options& o) {
  const auto p = params_of<Real>(o);
  const auto prec = qgt::Precision<Real>::standard().with_eps(qgt::pow10<Real>(-14));
  const auto row = qgt::kernels::kernel_row(config_of(o), p, prec, m_max_of(o));
  write_out(o.output, qgt::io::to_json(row, p).dump(2) + "\n");
  return 0;
}

template <class Real>
int run_compose(const Options& o) {
  const auto p = params_of<Real>(o);
  const auto prec = qgt::Precision<Real>::standard().with_eps(qgt::pow10<Real>(-14));
  const auto row = qgt::kernels::kernel_compose(config_of(o), o.level, p, prec, m_max_of(o));
  write_out(o.output, qgt::io::to_json(row, p).dump(2) + "\n");
  return 0;
}

template <class Real>
int run_extended_row(const Options& o) {
  const auto p = params_of<Real>(o);
  const auto prec = qgt::Precision<Real>::standard().with_eps(qgt::pow10<Real>(-14));
  const auto ext = qgt::kernels::extended_kernel_row(config_of(o), o.level,
                                                     static_cast<coord_t>(o.insert_a), p, prec,
                                                     m_max_of(o));
  qgt::io::json j{{"row", qgt::io::to_json(ext.row, p)},
                  {"violating_mass", qgt::to_decimal_string(ext.violating_mass)},
                  {"insert_a", o.insert_a}};
  write_out(o.output, j.dump(2) + "\n");
  return 0;
}

int run_sample(const Options& o) {
  // sampling path: double precision by design
  const auto p = params_of<double>(o);
  const auto prec = qgt::Precision<double>::standard();
  const auto x = config_of(o);
  std::string out;
  for (std::uint64_t i = 0; i < o.paths; ++i) {
    CounterRng rng(o.seed + i);
    const auto path = qgt::chain::sample_path(x, rng, p, prec);
    out += qgt::io::to_json(path, p).dump() + "\n";
  }
  write_out(o.output, out);
  return 0;
}

template <class Real>
int run_boundary(const Options& o) {
  const auto p = params_of<Real>(o);
  const auto prec = qgt::Precision<Real>::standard().with_eps(qgt::pow10<Real>(-14));
  qgt::lattice::InfiniteSignature plus(parse_int_list(o.plus_head), parse_tail(o.plus_tail));
  qgt::lattice::InfiniteSignature minus(parse_int_list(o.minus_head), parse_tail(o.minus_tail));
  qgt::lattice::InfiniteConfiguration<Real> xi({plus, minus}, p,
                                               qgt::lattice::default_delta(p, prec));
  const int K = o.level;
  const int n_approx = o.n_approx > K ? o.n_approx : K + 4;
  const auto row = qgt::chain::boundary_row(xi, K, n_approx, p, prec);
  std::string csv = qgt::io::moment_csv_header() + "\n";
  for (const Partition& nu : qgt::shapes::partitions_up_to(o.nu_max, K, true)) {
    const auto m = qgt::chain::moment(row, nu, p, prec);
    csv += qgt::io::moment_csv_line(nu, K, n_approx, m.value, m.band) + "\n";
  }
  write_out(o.output, csv);
  return 0;
}

template <class Real>
int run_verify(const Options& o) {
  std::vector<qgt::verify::SuiteItem> items;
  if (!o.manifest.empty()) {
    std::ifstream f(o.manifest);
    if (!f) throw std::runtime_error("cannot open manifest: " + o.manifest);
    items = qgt::verify::suite_from_manifest<Real>(qgt::verify::parse_manifest(f));
  } else {
    if (!o.suite.empty() && o.suite != "default")
      throw CLI::ValidationError("unknown suite '" + o.suite + "' (available: default)");
    items = qgt::verify::default_suite<Real>();
  }
  if (o.format != "json" && o.format != "csv")
    throw CLI::ValidationError("--format must be json or csv");
  const unsigned jobs = o.jobs ? o.jobs : qgt::default_jobs();
  const auto reports = qgt::verify::run_suite(items, jobs);
  std::string out;
  if (o.format == "csv") out = qgt::verify::report_csv_header() + "\n";
  bool all_passed = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (o.format == "csv") {
      out += qgt::verify::report_csv_line(reports[i]) + "\n";
    } else {
      out += qgt::verify::to_json(reports[i], o.runtime).dump() + "\n";
    }
    std::cerr << (reports[i].passed ? "[PASS] " : "[FAIL] ") << items[i].label
              << "  residual=" << reports[i].residual << " tol=" << reports[i].tolerance
              << " (" << reports[i].runtime_s << "s)\n";
    all_passed = all_passed && reports[i].passed;
  }
  write_out(o.output, out);
  return all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env = std::getenv("QGT_DIGITS")) o.digits = std::atoi(env);

  CLI::App app{"Markov kernels on the extended q-lattice Gelfand-Tsetlin graph"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.add_option("--digits", o.digits, "working precision tier (25, 50, or 100)")
      ->capture_default_str();

  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--q", o.q, "parameter q in (0,1), decimal string");
    cmd->add_option("--t", o.t, "parameter t in (0,1), decimal string");
    cmd->add_option("--tau", o.tau, "integer tau sets t = q^tau exactly");
    cmd->add_option("--zeta-plus", o.zeta_plus, "positive lattice scale");
    cmd->add_option("--zeta-minus", o.zeta_minus, "negative lattice scale");
    cmd->add_option("--output", o.output, "write results to this file instead of stdout");
  };
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--plus", o.plus, "plus-side signature, comma separated");
    cmd->add_option("--minus", o.minus, "minus-side signature, comma separated");
  };

  auto* c_eval = app.add_subcommand("eval", "evaluate a Macdonald polynomial at given points");
  add_params(c_eval);
  c_eval->add_option("--nu", o.nu, "partition label, comma separated")->required();
  c_eval->add_option("--points", o.points, "evaluation points, comma separated decimals")
      ->required();

  auto* c_row = app.add_subcommand("kernel-row", "one-step kernel row from a configuration");
  add_params(c_row);
  add_config(c_row);
  c_row->add_option("--m-max", o.m_max, "override the straddle enumeration depth");

  auto* c_compose = app.add_subcommand("compose", "composed kernel row down to level K");
  add_params(c_compose);
  add_config(c_compose);
  c_compose->add_option("--level", o.level, "target level K")->required();
  c_compose->add_option("--m-max", o.m_max, "override the straddle enumeration depth");

  auto* c_ext = app.add_subcommand("extended-row",
                                   "extended kernel row at a degenerate configuration");
  add_params(c_ext);
  add_config(c_ext);
  c_ext->add_option("--level", o.level, "ambient level N (> number of points)")->required();
  c_ext->add_option("--insert-a", o.insert_a, "insertion depth A")->capture_default_str();

  auto* c_sample = app.add_subcommand("sample", "sample down-paths (double precision)");
  add_params(c_sample);
  add_config(c_sample);
  c_sample->add_option("--paths", o.paths, "number of paths")->capture_default_str();
  c_sample->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();

  auto* c_boundary = app.add_subcommand("boundary",
                                        "boundary-row moment table for an infinite configuration");
  add_params(c_boundary);
  c_boundary->add_option("--plus-head", o.plus_head, "plus-side head coordinates");
  c_boundary->add_option("--plus-tail", o.plus_tail, "none | constant | arith:<step>")
      ->capture_default_str();
  c_boundary->add_option("--minus-head", o.minus_head, "minus-side head coordinates");
  c_boundary->add_option("--minus-tail", o.minus_tail, "none | constant | arith:<step>")
      ->capture_default_str();
  c_boundary->add_option("--level", o.level, "target level K")->required();
  c_boundary->add_option("--n-approx", o.n_approx, "approximation level (default K+4)");
  c_boundary->add_option("--nu-max", o.nu_max, "max |nu| in the moment table")
      ->capture_default_str();

  auto* c_verify = app.add_subcommand("verify", "run identity checks; exit 2 on failure");
  c_verify->add_option("--suite", o.suite, "named suite (default)");
  c_verify->add_option("--manifest", o.manifest, "manifest file with one check per line");
  c_verify->add_option("--jobs", o.jobs, "parallel workers (default: QGT_JOBS or hardware)");
  c_verify->add_option("--output", o.output, "write reports to this file");
  c_verify->add_option("--format", o.format, "report format: json (JSON lines) or csv")
      ->capture_default_str();
  c_verify->add_flag("--runtime", o.runtime, "include runtimes in the report output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto dispatch = [&](auto run50, auto run25, auto run100) -> int {
      switch (o.digits) {
        case 25:
          return run25();
        case 50:
          return run50();
        case 100:
          return run100();
        default:
          throw CLI::ValidationError("--digits must be one of 25, 50, 100");
      }
    };
    if (app.got_subcommand(c_eval))
      return dispatch([&] { return run_eval<qgt::real50>(o); },
                      [&] { return run_eval<qgt::real25>(o); },
                      [&] { return run_eval<qgt::real100>(o); });
    if (app.got_subcommand(c_row))
      return dispatch([&] { return run_kernel_row<qgt::real50>(o); },
                      [&] { return run_kernel_row<qgt::real25>(o); },
                      [&] { return run_kernel_row<qgt::real100>(o); });
    if (app.got_subcommand(c_compose))
      return dispatch([&] { return run_compose<qgt::real50>(o); },
                      [&] { return run_compose<qgt::real25>(o); },
                      [&] { return run_compose<qgt::real100>(o); });
    if (app.got_subcommand(c_ext))
      return dispatch([&] { return run_extended_row<qgt::real50>(o); },
                      [&] { return run_extended_row<qgt::real25>(o); },
                      [&] { return run_extended_row<qgt::real100>(o); });
    if (app.got_subcommand(c_sample)) return run_sample(o);
    if (app.got_subcommand(c_boundary))
      return dispatch([&] { return run_boundary<qgt::real50>(o); },
                      [&] { return run_boundary<qgt::real25>(o); },
                      [&] { return run_boundary<qgt::real100>(o); });
    if (app.got_subcommand(c_verify))
      return dispatch([&] { return run_verify<qgt::real50>(o); },
                      [&] { return run_verify<qgt::real25>(o); },
                      [&] { return run_verify<qgt::real100>(o); });
    return 1;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
