#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "relearn/certify.hpp"
#include "relearn/constructions.hpp"
#include "relearn/errors.hpp"
#include "relearn/harness.hpp"
#include "relearn/learn.hpp"
#include "relearn/serialize.hpp"

using namespace relearn;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

Concept concept_arg(const std::string& text, int n) {
  return n > 0 ? parse_concept(text, n) : parse_concept(text);
}

void print_cert(std::ostream& out, const CertReport& r) {
  out << "certificate    " << (r.ok ? "ok" : "FAILED") << " at eps " << fmt(r.eps) << " over " << r.points
      << " points\n";
  out << "worst_pos      " << fmt(r.worst_pos) << "\n";
  out << "worst_neg      " << fmt(r.worst_neg) << "\n";
  if (r.witness) {
    out << "witness        ";
    for (int v : r.witness->bits()) out << (v > 0 ? '+' : '-');
    out << "\n";
  }
}

void print_metrics(std::ostream& out, const std::string& label, const ErrorMetrics& e) {
  out << std::left << std::setw(10) << label << " false_pos " << fmt(e.false_pos) << "  false_neg "
      << fmt(e.false_neg) << "  err " << fmt(e.err) << "  unknown " << fmt(e.unknown_rate) << "\n";
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::string concept_text;
  int n = 0;
  std::string construction = "eps";
  std::string sign = "positive";
  double eps = 0.1;
  int d = 1;
  int cert_cap = 24;
  std::string out;
};

int cmd_construct(const ConstructArgs& a, bool json) {
  const Concept c = concept_arg(a.concept_text, a.n);
  ConstructOptions opts;
  opts.cert.max_vars = a.cert_cap;
  Approximant ap;
  if (a.construction == "quarter") {
    ap.poly = halfspace_pos_quarter(as_halfspace(c));
    ap.mode = ApproxMode::Positive;
    ap.eps = 0.25;
  } else if (a.construction == "exact") {
    ap.poly = halfspace_exact(as_halfspace(c));
    ap.mode = ApproxMode::TwoSided;
    ap.eps = 0.0;
  } else if (a.construction == "eps") {
    ap = halfspace_onesided_eps(c, parse_sign(a.sign), a.eps, opts);
  } else if (a.construction == "and") {
    const auto* conj = c.as<Conjunction>();
    if (conj == nullptr) throw InputError("the and construction needs a CONJ concept");
    ap = and_tradeoff_literals(conj->literals, c.dimension(), a.d, a.eps, opts);
  } else if (a.construction == "dnf") {
    ap = dnf_pos_onesided(c, a.d, a.eps, opts);
  } else if (a.construction == "cnf") {
    ap = cnf_neg_onesided(c, a.d, a.eps, opts);
  } else {
    throw InputError("unknown construction '" + a.construction + "'");
  }
  if (a.construction == "quarter" || a.construction == "exact") {
    ap.degree_bound = ap.poly.declared_degree();
    ap.weight_bound = analytic_weight_bound(ap.poly);
    if (c.dimension() <= opts.cert.max_vars) {
      ap.certificate = verify(ap.poly, c, ap.eps, ap.mode, opts.cert);
      ap.certified = ap.certificate->ok;
    }
  }
  const WeightDegree wd = weight_and_degree(ap.poly);
  Json doc = to_json(ap);
  doc["construction"] = a.construction;
  doc["concept"] = to_string(c);
  doc["sign"] = to_string(ap.mode);
  doc["weight"] = {{"value", wd.weight}, {"degree", wd.degree}, {"exact", wd.exact}};
  if (!a.out.empty()) write_text(a.out, doc.dump(2) + "\n");
  if (json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "construction   " << a.construction << "\n"
              << "concept        " << to_string(c) << "\n"
              << "mode           " << to_string(ap.mode) << "\n"
              << "eps            " << fmt(ap.eps) << "\n"
              << "degree bound   " << ap.degree_bound << "\n"
              << "weight bound   " << fmt(ap.weight_bound) << "\n"
              << "weight         " << fmt(wd.weight) << (wd.exact ? " (exact)" : " (analytic bound)") << "\n";
    if (ap.k > 0) std::cout << "k              " << ap.k << "\n";
    if (ap.certificate) print_cert(std::cout, *ap.certificate);
    else std::cout << "certificate    none (n above the certification cap)\n";
  }
  return 0;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string poly_file;
  std::string concept_text;
  int n = 0;
  std::string mode;
  double eps = -1.0;
  int cap = 24;
};

int cmd_certify(const CertifyArgs& a, bool json) {
  const Json doc = read_json(a.poly_file);
  const Json& pj = doc.contains("polynomial") ? doc.at("polynomial") : doc;
  const StructuredPolynomial p = structured_from_json(pj);
  std::string text = a.concept_text;
  if (text.empty() && doc.contains("concept")) text = doc.at("concept").get<std::string>();
  if (text.empty()) throw InputError("no concept given and none stored with the polynomial");
  const Concept c = concept_arg(text, a.n > 0 ? a.n : p.dimension());
  std::string mode = a.mode;
  if (mode.empty()) mode = doc.value("mode", std::string("positive"));
  double eps = a.eps;
  if (eps < 0) {
    if (!doc.contains("eps")) throw InputError("no eps given and none stored with the polynomial");
    eps = doc.at("eps").get<double>();
  }
  CertifyOptions opts;
  opts.max_vars = a.cap;
  const CertReport r = verify(p, c, eps, parse_mode(mode), opts);
  if (json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    std::cout << "concept        " << to_string(c) << "\nmode           " << mode << "\n";
    print_cert(std::cout, r);
  }
  return r.ok ? 0 : 1;
}

// ---------------------------------------------------------------- mineps

struct MinEpsArgs {
  std::string concept_text;
  int n = 0;
  std::string mode = "positive";
  int dmin = 0;
  int dmax = 3;
};

int cmd_mineps(const MinEpsArgs& a, bool json) {
  const Concept c = concept_arg(a.concept_text, a.n);
  const ApproxMode mode = parse_mode(a.mode);
  Json rows = Json::array();
  if (!json) std::cout << "d    eps*\n";
  for (int d = a.dmin; d <= a.dmax; ++d) {
    const MinEpsResult r = min_eps(c, d, mode);
    rows.push_back({{"d", d}, {"eps", r.eps}, {"witness", to_json(r.p)}});
    if (!json) std::cout << std::left << std::setw(4) << d << ' ' << std::setprecision(9) << r.eps << "\n";
  }
  if (json) {
    std::cout << Json{{"concept", to_string(c)}, {"mode", to_string(mode)}, {"table", rows}}.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- learn

struct LearnArgs {
  std::string train;
  std::string calibration;
  std::string test;
  std::string learner = "reliable";
  std::string sign = "positive";
  int d = 1;
  double W = 1.0;
  double eps = 0.1;
  std::string out;
};

int cmd_learn(const LearnArgs& a, bool json) {
  const LabeledSample train = read_sample_csv_file(a.train);
  std::optional<LabeledSample> cal, test;
  if (!a.calibration.empty()) cal = read_sample_csv_file(a.calibration);
  if (!a.test.empty()) test = read_sample_csv_file(a.test);
  auto need_cal = [&] {
    if (!cal) throw InputError("the " + a.learner + " learner needs --calibration");
    return *cal;
  };
  Json doc = {{"learner", a.learner}};
  std::optional<PartialHypothesis> h;
  if (a.learner == "reliable") {
    auto r = learn_reliable(train, a.d, a.W, a.eps, parse_sign(a.sign), need_cal());
    doc["fit"] = to_json(r.fit);
    doc["hypothesis"] = to_json(r.h);
    h = r.h.as_partial();
  } else if (a.learner == "fully") {
    auto r = learn_fully_reliable(train, {a.d, a.W, a.eps}, need_cal());
    doc["fit"] = {{"positive", to_json(r.positive.fit)}, {"negative", to_json(r.negative.fit)}};
    doc["hypothesis"] = {{"positive", to_json(r.positive.h)}, {"negative", to_json(r.negative.h)}};
    h = std::move(r.h);
  } else if (a.learner == "disjunction") {
    const Concept c = learn_disjunction_positive(train);
    doc["hypothesis"] = {{"concept", to_string(c)}};
    h = PartialHypothesis::from_concept(c);
  } else if (a.learner == "l1") {
    auto [p, rep] = agnostic_l1_fit(train, a.d, a.W);
    const double t = cal ? calibrate_threshold(p, *cal) : 0.0;
    doc["fit"] = to_json(rep);
    doc["hypothesis"] = {{"polynomial", to_json(p)}, {"threshold", number_or_inf(t)}};
    h = PartialHypothesis::total(train.n, [p, t](const CubePoint& x) { return p.evaluate(x) > t ? 1 : -1; });
  } else {
    throw InputError("unknown learner '" + a.learner + "'");
  }
  const ErrorMetrics on_train = empirical_metrics(*h, train);
  doc["train"] = {{"false_pos", on_train.false_pos}, {"false_neg", on_train.false_neg},
                  {"err", on_train.err}, {"unknown_rate", on_train.unknown_rate}};
  std::optional<ErrorMetrics> on_test;
  if (test) {
    on_test = empirical_metrics(*h, *test);
    doc["test"] = {{"false_pos", on_test->false_pos}, {"false_neg", on_test->false_neg},
                   {"err", on_test->err}, {"unknown_rate", on_test->unknown_rate}};
  }
  if (!a.out.empty()) write_text(a.out, doc.at("hypothesis").dump(2) + "\n");
  if (json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "learner    " << a.learner << "  (m = " << train.size() << ", n = " << train.n << ")\n";
    if (doc.contains("fit") && doc.at("fit").contains("objective_value")) {
      std::cout << "objective  " << fmt(doc.at("fit").at("objective_value").get<double>()) << "\n";
    }
    if (a.learner == "disjunction") std::cout << "hypothesis " << doc.at("hypothesis").at("concept").get<std::string>() << "\n";
    print_metrics(std::cout, "train", on_train);
    if (on_test) print_metrics(std::cout, "test", *on_test);
  }
  return 0;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  int n = 1;
  int d = 1;
  double W = 1.0;
  double eps = 0.1;
  double delta = 0.05;
};

int cmd_plan(const PlanArgs& a, bool json) {
  const SamplePlan p = plan_samples(a.n, a.d, a.W, a.eps, a.delta);
  const double R = rademacher_bound(a.W, a.d, a.n, static_cast<double>(p.m));
  const double alpha = alpha_bound(a.W, a.d, a.n, static_cast<double>(p.m), a.eps, a.delta);
  if (json) {
    std::cout << Json{{"m", p.m},
                      {"term_rademacher", p.term_rademacher},
                      {"term_confidence", p.term_confidence},
                      {"rademacher", R},
                      {"alpha", alpha}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << std::setprecision(10) << "term_rademacher  " << p.term_rademacher << "\n"
              << "term_confidence  " << p.term_confidence << "\n"
              << "m                " << p.m << "\n"
              << "rademacher(m)    " << R << "\n"
              << "alpha(m)         " << alpha << "  (eps/2 = " << a.eps / 2 << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string sample;
  std::string bank = "majority";
  std::string mode = "positive";
};

int cmd_oracle(const OracleArgs& a, bool json) {
  const LabeledSample s = read_sample_csv_file(a.sample);
  std::vector<Concept> bank;
  if (a.bank == "majority") {
    bank = majority_bank(s.n);
  } else if (a.bank == "monotone_disjunction") {
    bank = monotone_disjunction_bank(s.n);
  } else {
    throw InputError("unknown bank '" + a.bank + "'");
  }
  const OptResult r = brute_opt(s, bank, parse_opt_mode(a.mode));
  Json arg = Json::array();
  for (const auto& c : r.argmin) arg.push_back(to_string(c));
  if (json) {
    std::cout << Json{{"mode", a.mode}, {"bank", a.bank}, {"bank_size", bank.size()}, {"value", r.value}, {"argmin", arg}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "bank     " << a.bank << " (" << bank.size() << " concepts)\n"
              << "opt      " << std::setprecision(10) << r.value << "\n";
    for (const auto& c : r.argmin) std::cout << "argmin   " << to_string(c) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- bench / replay

struct BenchArgs {
  std::vector<std::string> files;
  int jobs = 1;
  std::string summary;
  std::string runs;
};

std::vector<Json> load_manifests(const std::string& path) {
  const std::string text = read_text(path);
  std::vector<Json> out;
  try {
    const Json j = Json::parse(text);
    if (j.is_array()) {
      for (const auto& m : j) out.push_back(m);
    } else {
      out.push_back(j);
    }
    return out;
  } catch (const Json::parse_error&) {
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  return out;
}

int cmd_bench(const BenchArgs& a, bool json) {
  std::vector<Json> manifests;
  for (const auto& f : a.files) {
    auto ms = load_manifests(f);
    manifests.insert(manifests.end(), ms.begin(), ms.end());
  }
  const std::filesystem::path root = a.runs.empty() ? default_runs_root() : std::filesystem::path(a.runs);
  std::vector<std::optional<RunOutcome>> results(manifests.size());
  std::vector<std::string> failures(manifests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < manifests.size(); i = next++) {
      try {
        results[i] = run_experiment(manifests[i], root);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int jobs = std::max(1, std::min<int>(a.jobs, static_cast<int>(manifests.size())));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int status = 0;
  Json rows = Json::array();
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    if (!results[i]) {
      status = 1;
      rows.push_back({{"index", i}, {"status", "error"}, {"error", failures[i]}});
      if (!json) std::cerr << "manifest " << i << ": " << failures[i] << "\n";
      continue;
    }
    const auto& r = *results[i];
    if (!a.summary.empty()) append_summary(a.summary, r);
    const std::string st = r.result.value("status", std::string("?"));
    if (st != "ok") status = 1;
    rows.push_back({{"index", i}, {"status", st}, {"dir", r.dir.string()}, {"result", r.result}});
    if (!json) {
      std::cout << r.dir.string() << "  " << st;
      if (r.result.contains("metrics")) {
        const auto& t = r.result.at("metrics").at("test");
        std::cout << "  false_pos " << fmt(t.at("false_pos").get<double>()) << "  false_neg "
                  << fmt(t.at("false_neg").get<double>()) << "  unknown " << fmt(t.at("unknown_rate").get<double>());
      }
      if (r.result.contains("opt")) std::cout << "  opt " << fmt(r.result.at("opt").at("value").get<double>());
      if (r.result.contains("error")) std::cout << "  " << r.result.at("error").dump();
      std::cout << "\n";
    }
  }
  if (json) std::cout << rows.dump(2) << "\n";
  return status;
}

int cmd_replay(const std::string& dir, bool json) {
  const ReplayOutcome r = replay(dir);
  if (json) {
    std::cout << Json{{"dir", dir}, {"identical", r.identical}}.dump(2) << "\n";
  } else {
    std::cout << dir << ": " << (r.identical ? "result.json reproduced byte-identically" : "result.json DIFFERS")
              << "\n";
  }
  return r.identical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial constructions, cube certificates and reliable learners", "relearn"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Emit the documented JSON schema instead of tables");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Build an approximating polynomial and certify it");
  construct->add_option("--concept", ca.concept_text, "Concept text, e.g. \"MAJ 1 2 3\"")->required();
  construct->add_option("--n", ca.n, "Dimension (default: inferred)")->check(CLI::NonNegativeNumber);
  construct->add_option("--construction", ca.construction, "quarter | eps | exact | and | dnf | cnf")
      ->check(CLI::IsMember({"quarter", "eps", "exact", "and", "dnf", "cnf"}));
  construct->add_option("--sign", ca.sign, "positive | negative")->check(CLI::IsMember({"positive", "negative"}));
  construct->add_option("--eps", ca.eps, "Target error")->check(CLI::Range(0.0, 1.0));
  construct->add_option("--d", ca.d, "Degree parameter for the AND/DNF/CNF tradeoffs")->check(CLI::PositiveNumber);
  construct->add_option("--cert-cap", ca.cert_cap, "Largest n certified exhaustively")->check(CLI::Range(0, 30));
  construct->add_option("--out", ca.out, "Write the construction JSON here");

  CertifyArgs ce;
  auto* certify = app.add_subcommand("certify", "Exhaustively re-check a stored polynomial");
  certify->add_option("--poly", ce.poly_file, "Polynomial or construct output JSON")->required()->check(CLI::ExistingFile);
  certify->add_option("--concept", ce.concept_text, "Concept text (default: stored with the polynomial)");
  certify->add_option("--n", ce.n, "Dimension")->check(CLI::NonNegativeNumber);
  certify->add_option("--mode", ce.mode, "positive | negative | twosided")
      ->check(CLI::IsMember({"positive", "negative", "twosided"}));
  certify->add_option("--eps", ce.eps, "Error to certify (default: stored)")->check(CLI::Range(0.0, 2.0));
  certify->add_option("--cap", ce.cap, "Largest n enumerated")->check(CLI::Range(0, 30));

  MinEpsArgs me;
  auto* mineps = app.add_subcommand("mineps", "LP oracle: minimal eps per degree");
  mineps->add_option("--concept", me.concept_text, "Concept text")->required();
  mineps->add_option("--n", me.n, "Dimension")->check(CLI::NonNegativeNumber);
  mineps->add_option("--mode", me.mode, "positive | negative | twosided")
      ->check(CLI::IsMember({"positive", "negative", "twosided"}));
  mineps->add_option("--dmin", me.dmin, "Smallest degree")->check(CLI::NonNegativeNumber);
  mineps->add_option("--dmax", me.dmax, "Largest degree")->check(CLI::NonNegativeNumber);

  LearnArgs le;
  auto* learn = app.add_subcommand("learn", "Train a learner on a CSV sample");
  learn->add_option("--train", le.train, "Training CSV")->required()->check(CLI::ExistingFile);
  learn->add_option("--calibration", le.calibration, "Fresh CSV for threshold calibration")->check(CLI::ExistingFile);
  learn->add_option("--test", le.test, "Held-out CSV")->check(CLI::ExistingFile);
  learn->add_option("--learner", le.learner, "reliable | fully | disjunction | l1")
      ->check(CLI::IsMember({"reliable", "fully", "disjunction", "l1"}));
  learn->add_option("--sign", le.sign, "positive | negative")->check(CLI::IsMember({"positive", "negative"}));
  learn->add_option("--d", le.d, "Degree")->check(CLI::NonNegativeNumber);
  learn->add_option("--W", le.W, "Weight bound")->check(CLI::NonNegativeNumber);
  learn->add_option("--eps", le.eps, "Error parameter")->check(CLI::Range(0.0, 1.0));
  learn->add_option("--out", le.out, "Write the hypothesis JSON here");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Sample size from the reliable learner's bound");
  plan->add_option("--n", pa.n, "Dimension")->required()->check(CLI::PositiveNumber);
  plan->add_option("--d", pa.d, "Degree")->required()->check(CLI::PositiveNumber);
  plan->add_option("--W", pa.W, "Weight bound")->required()->check(CLI::PositiveNumber);
  plan->add_option("--eps", pa.eps, "Error parameter")->required()->check(CLI::Range(0.0, 1.0));
  plan->add_option("--delta", pa.delta, "Failure probability")->required()->check(CLI::Range(0.0, 1.0));

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Brute-force optimal reliable classifier over a bank");
  oracle->add_option("--sample", oa.sample, "Sample CSV")->required()->check(CLI::ExistingFile);
  oracle->add_option("--bank", oa.bank, "majority | monotone_disjunction")
      ->check(CLI::IsMember({"majority", "monotone_disjunction"}));
  oracle->add_option("--mode", oa.mode, "positive | negative | fully")
      ->check(CLI::IsMember({"positive", "negative", "fully"}));

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run experiment manifests in a worker pool");
  bench->add_option("manifests", ba.files, "JSON manifest files (object, array or JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--jobs", ba.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--summary", ba.summary, "Append one CSV row per run here");
  bench->add_option("--runs", ba.runs, "Run directory root (default: $RELEARN_RUNS or ./runs)");

  std::string replay_dir;
  auto* replay_cmd = app.add_subcommand("replay", "Re-execute a stored run and compare result.json");
  replay_cmd->add_option("dir", replay_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*construct) return cmd_construct(ca, json);
    if (*certify) return cmd_certify(ce, json);
    if (*mineps) return cmd_mineps(me, json);
    if (*learn) return cmd_learn(le, json);
    if (*plan) return cmd_plan(pa, json);
    if (*oracle) return cmd_oracle(oa, json);
    if (*bench) return cmd_bench(ba, json);
    if (*replay_cmd) return cmd_replay(replay_dir, json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
