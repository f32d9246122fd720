#include "relearn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "relearn/constructions.hpp"
#include "relearn/errors.hpp"
#include "relearn/learn.hpp"

namespace relearn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stage_seed(std::uint64_t seed, Stage stage) {
  return splitmix64(seed ^ static_cast<std::uint64_t>(stage));
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

CubePoint Rng::point(int n) {
  std::vector<std::int8_t> bits(static_cast<std::size_t>(n));
  std::uint64_t word = 0;
  for (int i = 0; i < n; ++i) {
    if (i % 64 == 0) word = next();
    bits[i] = ((word >> (i % 64)) & 1) ? 1 : -1;
  }
  return CubePoint(std::move(bits));
}

// ---------------------------------------------------------------- noise

NoiseModel NoiseModel::adversarial_table(std::vector<TableEntry> table) {
  if (table.empty()) throw InputError("adversarial table is empty");
  double total = 0.0;
  const int n = table.front().x.dimension();
  for (const auto& e : table) {
    if (e.prob < 0) throw InputError("adversarial table has a negative probability");
    if (e.y != 1 && e.y != -1) throw InputError("adversarial table labels must be -1 or +1");
    if (e.x.dimension() != n) throw InputError("adversarial table points differ in dimension");
    total += e.prob;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InputError("adversarial table probabilities must sum to 1");
  NoiseModel m;
  m.kind = Kind::AdversarialTable;
  m.table = std::move(table);
  return m;
}

namespace {

const char* kind_name(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::None:
      return "none";
    case NoiseModel::Kind::OneSidedPositive:
      return "one_sided_positive";
    case NoiseModel::Kind::OneSidedNegative:
      return "one_sided_negative";
    case NoiseModel::Kind::Symmetric:
      return "symmetric";
    case NoiseModel::Kind::AdversarialTable:
      return "adversarial_table";
  }
  return "?";
}

Json point_json(const CubePoint& x) {
  Json a = Json::array();
  for (int v : x.bits()) a.push_back(v);
  return a;
}

CubePoint point_from_json(const Json& j) {
  std::vector<std::int8_t> bits;
  for (const auto& v : j) bits.push_back(static_cast<std::int8_t>(v.get<int>()));
  return CubePoint(std::move(bits));
}

}  // namespace

Json to_json(const NoiseModel& noise) {
  Json j = {{"kind", kind_name(noise.kind)}};
  if (noise.kind == NoiseModel::Kind::AdversarialTable) {
    Json rows = Json::array();
    for (const auto& e : noise.table) rows.push_back({{"x", point_json(e.x)}, {"y", e.y}, {"p", e.prob}});
    j["table"] = rows;
  } else if (noise.kind != NoiseModel::Kind::None) {
    j["eta"] = noise.eta;
  }
  return j;
}

NoiseModel noise_from_json(const Json& j) {
  if (j.is_null()) return NoiseModel::none();
  const auto kind = j.at("kind").get<std::string>();
  const double eta = j.value("eta", 0.0);
  if (kind != "none" && kind != "adversarial_table" && !(eta >= 0.0 && eta < 1.0)) {
    throw InputError("noise eta must lie in [0, 1)");
  }
  if (kind == "none") return NoiseModel::none();
  if (kind == "one_sided_positive") return NoiseModel::one_sided_positive(eta);
  if (kind == "one_sided_negative") return NoiseModel::one_sided_negative(eta);
  if (kind == "symmetric") return NoiseModel::symmetric(eta);
  if (kind == "adversarial_table") {
    std::vector<TableEntry> rows;
    for (const auto& r : j.at("table")) {
      rows.push_back({point_from_json(r.at("x")), r.at("y").get<int>(), r.at("p").get<double>()});
    }
    return NoiseModel::adversarial_table(std::move(rows));
  }
  throw InputError("unknown noise kind '" + kind + "'");
}

LabeledSample generate(const Concept& c, const NoiseModel& noise, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw InputError("sample size must be >= 1");
  const int n = c.dimension();
  Rng rng(seed);
  LabeledSample s(n);
  s.points.reserve(m);
  s.labels.reserve(m);
  if (noise.kind == NoiseModel::Kind::AdversarialTable) {
    if (noise.table.front().x.dimension() != n) throw InputError("table dimension differs from concept");
    for (std::size_t i = 0; i < m; ++i) {
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = noise.table.size() - 1;
      for (std::size_t k = 0; k < noise.table.size(); ++k) {
        acc += noise.table[k].prob;
        if (u < acc) {
          pick = k;
          break;
        }
      }
      s.add(noise.table[pick].x, noise.table[pick].y);
    }
    return s;
  }
  for (std::size_t i = 0; i < m; ++i) {
    CubePoint x = rng.point(n);
    int y = c(x);
    const double u = rng.uniform();
    switch (noise.kind) {
      case NoiseModel::Kind::OneSidedPositive:
        if (y < 0 && u < noise.eta) y = 1;
        break;
      case NoiseModel::Kind::OneSidedNegative:
        if (y > 0 && u < noise.eta) y = -1;
        break;
      case NoiseModel::Kind::Symmetric:
        if (u < noise.eta) y = -y;
        break;
      default:
        break;
    }
    s.add(std::move(x), y);
  }
  return s;
}

ErrorMetrics population_metrics(const PartialHypothesis& h, const std::vector<TableEntry>& table) {
  ErrorMetrics e;
  for (const auto& row : table) {
    const Ternary v = h(row.x);
    if (v == Ternary::Unknown) {
      e.unknown_rate += row.prob;
      continue;
    }
    const int hv = v == Ternary::Pos ? 1 : -1;
    if (hv == 1 && row.y == -1) e.false_pos += row.prob;
    if (hv == -1 && row.y == 1) e.false_neg += row.prob;
  }
  e.err = e.false_pos + e.false_neg;
  return e;
}

// ---------------------------------------------------------------- banks

std::vector<Concept> majority_bank(int n, int max_n) {
  if (n < 1) throw InputError("bank dimension must be >= 1");
  if (n > max_n) {
    throw ResourceError("majority bank cap exceeded: n = " + std::to_string(n) + " > " + std::to_string(max_n));
  }
  std::vector<Concept> bank;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> vars;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) vars.push_back(i + 1);
    }
    bank.push_back(make_majority(n, std::move(vars)));
  }
  bank.push_back(constant_concept(n, -1));
  bank.push_back(constant_concept(n, 1));
  return bank;
}

std::vector<Concept> monotone_disjunction_bank(int n, int max_n) {
  if (n < 1) throw InputError("bank dimension must be >= 1");
  if (n > max_n) {
    throw ResourceError("disjunction bank cap exceeded: n = " + std::to_string(n) + " > " + std::to_string(max_n));
  }
  std::vector<Concept> bank;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Clause lits;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) lits.push_back({i + 1, false});
    }
    bank.emplace_back(n, Disjunction{std::move(lits)});
  }
  bank.push_back(constant_concept(n, 1));
  return bank;
}

std::string to_string(OptMode m) {
  switch (m) {
    case OptMode::Positive:
      return "positive";
    case OptMode::Negative:
      return "negative";
    case OptMode::Fully:
      return "fully";
  }
  return "?";
}

OptMode parse_opt_mode(const std::string& text) {
  if (text == "positive" || text == "pos") return OptMode::Positive;
  if (text == "negative" || text == "neg") return OptMode::Negative;
  if (text == "fully" || text == "full") return OptMode::Fully;
  throw InputError("unknown oracle mode '" + text + "' (expected positive, negative or fully)");
}

OptResult brute_opt(const LabeledSample& s, const std::vector<Concept>& bank, OptMode mode,
                    std::size_t max_bank) {
  if (s.empty()) throw InputError("oracle needs a nonempty sample");
  if (bank.empty()) throw InputError("oracle bank is empty");
  if (bank.size() > max_bank) {
    throw ResourceError("oracle bank cap exceeded: " + std::to_string(bank.size()) + " > " +
                        std::to_string(max_bank));
  }
  const auto pts = aggregate(s);
  const std::size_t D = pts.size();
  const std::size_t words = (D + 63) / 64;
  const double m = static_cast<double>(s.size());

  // bits[c] has bit j set iff concept c is +1 on distinct point j.
  std::vector<std::vector<std::uint64_t>> bits(bank.size(), std::vector<std::uint64_t>(words, 0));
  std::vector<std::string> text(bank.size());
  for (std::size_t c = 0; c < bank.size(); ++c) {
    if (bank[c].dimension() != s.n) throw InputError("bank concept dimension differs from the sample");
    text[c] = to_string(bank[c]);
    for (std::size_t j = 0; j < D; ++j) {
      if (bank[c](pts[j].x) > 0) bits[c][j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
  std::vector<std::uint64_t> has_pos(words, 0), has_neg(words, 0);
  for (std::size_t j = 0; j < D; ++j) {
    if (pts[j].positives) has_pos[j / 64] |= std::uint64_t{1} << (j % 64);
    if (pts[j].negatives) has_neg[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  auto weighted = [&](const std::vector<std::uint64_t>& mask, bool pos, bool neg) {
    std::size_t total = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t b = mask[w];
      while (b) {
        const std::size_t j = w * 64 + static_cast<std::size_t>(__builtin_ctzll(b));
        b &= b - 1;
        if (pos) total += pts[j].positives;
        if (neg) total += pts[j].negatives;
      }
    }
    return total;
  };
  const std::uint64_t last_mask = (D % 64) ? (std::uint64_t{1} << (D % 64)) - 1 : ~std::uint64_t{0};

  OptResult best;
  bool found = false;
  std::pair<std::string, std::string> best_key;
  std::size_t best_count = 0;
  auto offer = [&](std::size_t count, std::pair<std::string, std::string> key, std::vector<Concept> arg) {
    if (!found || count < best_count || (count == best_count && key < best_key)) {
      found = true;
      best_count = count;
      best_key = std::move(key);
      best.argmin = std::move(arg);
    }
  };

  if (mode != OptMode::Fully) {
    const bool positive = mode == OptMode::Positive;
    std::vector<std::uint64_t> complement(words);
    for (std::size_t c = 0; c < bank.size(); ++c) {
      // Positive: no +1 on a negatively labelled point; cost = positives at -1.
      bool feasible = true;
      for (std::size_t w = 0; w < words; ++w) {
        complement[w] = ~bits[c][w] & (w + 1 == words ? last_mask : ~std::uint64_t{0});
        const std::uint64_t bad = positive ? (bits[c][w] & has_neg[w]) : (complement[w] & has_pos[w]);
        if (bad) feasible = false;
      }
      if (!feasible) continue;
      const std::size_t cost = positive ? weighted(complement, true, false) : weighted(bits[c], false, true);
      offer(cost, {text[c], ""}, {bank[c]});
    }
  } else {
    std::vector<std::uint64_t> diff(words);
    for (std::size_t a = 0; a < bank.size(); ++a) {
      for (std::size_t b = 0; b < bank.size(); ++b) {
        bool ok = true;
        for (std::size_t w = 0; w < words && ok; ++w) {
          const std::uint64_t valid = w + 1 == words ? last_mask : ~std::uint64_t{0};
          const std::uint64_t both_pos = bits[a][w] & bits[b][w];
          const std::uint64_t both_neg = ~bits[a][w] & ~bits[b][w] & valid;
          ok = !(both_pos & has_neg[w]) && !(both_neg & has_pos[w]);
          diff[w] = bits[a][w] ^ bits[b][w];
        }
        if (!ok) continue;
        offer(weighted(diff, true, true), {text[a], text[b]}, {bank[a], bank[b]});
      }
    }
  }
  if (!found) throw InputError("no bank member is feasible for the " + to_string(mode) + " oracle");
  best.value = static_cast<double>(best_count) / m;
  return best;
}

// ---------------------------------------------------------------- runs

std::filesystem::path default_runs_root() {
  if (const char* env = std::getenv("RELEARN_RUNS"); env != nullptr && *env) return env;
  return "runs";
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string result_bytes(const Json& result) { return result.dump(2) + "\n"; }

namespace {

Json metrics_json(const ErrorMetrics& e) {
  return {{"false_pos", e.false_pos}, {"false_neg", e.false_neg}, {"err", e.err}, {"unknown_rate", e.unknown_rate}};
}

struct Computed {
  Json result;
  Json hypothesis;
  LabeledSample train;
};

Computed compute(const Json& in) {
  Computed out;
  Json& res = out.result;
  std::string stage = "parse";
  try {
    const std::uint64_t seed = in.at("seed").get<std::uint64_t>();
    const Concept target = in.contains("n")
                                ? parse_concept(in.at("concept").get<std::string>(), in.at("n").get<int>())
                                : parse_concept(in.at("concept").get<std::string>());
    const NoiseModel noise = noise_from_json(in.value("noise", Json(nullptr)));
    const Json learner = in.at("learner");
    const std::string kind = learner.at("kind").get<std::string>();
    const Json sizes = in.at("sizes");
    const auto m_train = sizes.at("train").get<std::size_t>();
    const auto m_cal = sizes.value("calibration", std::size_t{0});
    const auto m_test = sizes.at("test").get<std::size_t>();
    const std::string bank_name = in.value("bank", std::string("none"));
    const int n = target.dimension();

    stage = "generate";
    out.train = generate(target, noise, m_train, stage_seed(seed, Stage::Train));
    LabeledSample cal(n);
    if (m_cal > 0) cal = generate(target, noise, m_cal, stage_seed(seed, Stage::Calibration));
    const LabeledSample test = generate(target, noise, m_test, stage_seed(seed, Stage::Test));

    stage = "learn";
    const int d = learner.value("d", 1);
    const double eps = learner.value("eps", 0.1);
    double W = 0.0;
    if (learner.contains("W")) {
      if (learner.at("W").is_string() && learner.at("W").get<std::string>() == "exact") {
        W = to_double(expand(halfspace_exact(as_halfspace(target))).weight());
      } else {
        W = learner.at("W").get<double>();
      }
    }
    res["W_used"] = W;
    std::optional<PartialHypothesis> h;
    OptMode opt_mode = OptMode::Positive;
    if (kind == "reliable") {
      const Sign sign = parse_sign(learner.value("sign", std::string("positive")));
      opt_mode = sign == Sign::Positive ? OptMode::Positive : OptMode::Negative;
      auto r = learn_reliable(out.train, d, W, eps, sign, cal);
      res["fit"] = to_json(r.fit);
      out.hypothesis = to_json(r.h);
      h = r.h.as_partial();
    } else if (kind == "fully") {
      opt_mode = OptMode::Fully;
      auto r = learn_fully_reliable(out.train, {d, W, eps}, cal);
      res["fit"] = {{"positive", to_json(r.positive.fit)}, {"negative", to_json(r.negative.fit)}};
      out.hypothesis = {{"positive", to_json(r.positive.h)}, {"negative", to_json(r.negative.h)}};
      h = std::move(r.h);
    } else if (kind == "disjunction") {
      const Concept c = learn_disjunction_positive(out.train);
      out.hypothesis = {{"concept", to_string(c)}};
      h = PartialHypothesis::from_concept(c);
    } else if (kind == "l1") {
      auto [p, rep] = agnostic_l1_fit(out.train, d, W);
      const double t = m_cal > 0 ? calibrate_threshold(p, cal) : 0.0;
      res["fit"] = to_json(rep);
      out.hypothesis = {{"polynomial", to_json(p)}, {"threshold", number_or_inf(t)}};
      h = PartialHypothesis::total(n, [p, t](const CubePoint& x) { return p.evaluate(x) > t ? 1 : -1; });
      opt_mode = OptMode::Positive;
    } else {
      throw InputError("unknown learner kind '" + kind + "'");
    }

    stage = "evaluate";
    res["metrics"] = {{"test", metrics_json(empirical_metrics(*h, test))},
                      {"train", metrics_json(empirical_metrics(*h, out.train))}};
    const auto planted = PartialHypothesis::from_concept(target);
    res["planted"] = {{"test", metrics_json(empirical_metrics(planted, test))},
                      {"train", metrics_json(empirical_metrics(planted, out.train))}};
    if (noise.kind == NoiseModel::Kind::AdversarialTable) {
      res["population"] = metrics_json(population_metrics(*h, noise.table));
    }

    stage = "oracle";
    if (bank_name != "none") {
      std::vector<Concept> bank;
      if (bank_name == "majority") {
        bank = majority_bank(n);
      } else if (bank_name == "monotone_disjunction") {
        bank = monotone_disjunction_bank(n);
      } else {
        throw InputError("unknown bank '" + bank_name + "'");
      }
      const OptResult opt = brute_opt(test, bank, opt_mode);
      Json arg = Json::array();
      for (const auto& c : opt.argmin) arg.push_back(to_string(c));
      res["opt"] = {{"mode", to_string(opt_mode)}, {"value", opt.value}, {"argmin", arg}};
    }
    res["status"] = "ok";
  } catch (const std::exception& e) {
    res["status"] = "error";
    res["error"] = {{"stage", stage}, {"message", e.what()}};
  }
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write " + p.string());
  f << bytes;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

RunOutcome run_experiment(const Json& manifest_in, const std::filesystem::path& root) {
  if (!manifest_in.is_object()) throw InputError("manifest must be a JSON object");
  const std::string key = manifest_in.dump();
  const std::string hash = content_hash(key);
  Computed c = compute(manifest_in);

  RunOutcome out;
  out.dir = root / hash;
  std::filesystem::create_directories(out.dir);
  const std::string result_text = result_bytes(c.result);
  const std::string hyp_text = c.hypothesis.dump(2) + "\n";
  std::ostringstream csv;
  write_sample_csv(csv, c.train);

  Json plan = nullptr;
  if (manifest_in.contains("learner") && manifest_in.at("learner").value("kind", "") != "disjunction" &&
      c.result.contains("W_used")) {
    try {
      const Json& L = manifest_in.at("learner");
      const Concept target =
          manifest_in.contains("n")
              ? parse_concept(manifest_in.at("concept").get<std::string>(), manifest_in.at("n").get<int>())
              : parse_concept(manifest_in.at("concept").get<std::string>());
      const double W = c.result.at("W_used").get<double>();
      const auto p = plan_samples(target.dimension(), L.value("d", 1), W > 0 ? W : 1.0,
                                  L.value("eps", 0.1), manifest_in.value("delta", 0.05));
      plan = {{"m", p.m}, {"term_rademacher", p.term_rademacher}, {"term_confidence", p.term_confidence}};
    } catch (const std::exception&) {
      plan = nullptr;
    }
  }

  out.result = c.result;
  out.manifest = {{"input", manifest_in},
                  {"hash", hash},
                  {"prng", "mt19937_64, stage seeds splitmix64(seed ^ stage)"},
                  {"theory_plan", plan},
                  {"results", c.result},
                  {"artifacts",
                   {{"result.json", content_hash(result_text)},
                    {"hypothesis.json", content_hash(hyp_text)},
                    {"sample.csv", content_hash(csv.str())}}}};
  write_file(out.dir / "result.json", result_text);
  write_file(out.dir / "hypothesis.json", hyp_text);
  write_file(out.dir / "sample.csv", csv.str());
  write_file(out.dir / "manifest.json", out.manifest.dump(2) + "\n");
  return out;
}

ReplayOutcome replay(const std::filesystem::path& dir) {
  const Json manifest = Json::parse(read_file(dir / "manifest.json"));
  if (!manifest.contains("input")) throw InputError("manifest has no input section");
  ReplayOutcome r;
  r.stored = read_file(dir / "result.json");
  r.replayed = result_bytes(compute(manifest.at("input")).result);
  r.identical = r.stored == r.replayed;
  return r;
}

void append_summary(const std::filesystem::path& csv, const RunOutcome& run) {
  const bool fresh = !std::filesystem::exists(csv);
  std::ofstream f(csv, std::ios::app);
  if (!f) throw InputError("cannot append to " + csv.string());
  if (fresh) f << "hash,concept,noise,learner,d,W,eps,train,status,false_pos,false_neg,err,unknown_rate,opt\n";
  const Json& in = run.manifest.at("input");
  const Json& res = run.result;
  auto num = [](const Json& j, const char* k) -> std::string {
    return j.is_object() && j.contains(k) ? j.at(k).dump() : "";
  };
  const Json test = res.contains("metrics") ? res.at("metrics").at("test") : Json::object();
  std::string target = in.value("concept", std::string());
  std::replace(target.begin(), target.end(), ',', ' ');
  const Json learner = in.value("learner", Json::object());
  f << run.manifest.at("hash").get<std::string>() << ',' << target << ','
    << (in.contains("noise") && in.at("noise").is_object() ? in.at("noise").value("kind", std::string("none"))
                                                             : std::string("none"))
    << ','
    << learner.value("kind", std::string()) << ',' << num(learner, "d") << ',' << num(res, "W_used") << ','
    << num(learner, "eps") << ',' << num(in.value("sizes", Json::object()), "train") << ','
    << res.value("status", std::string()) << ',' << num(test, "false_pos") << ',' << num(test, "false_neg")
    << ',' << num(test, "err") << ',' << num(test, "unknown_rate") << ','
    << (res.contains("opt") ? res.at("opt").at("value").dump() : std::string()) << '\n';
}

}  // namespace relearn
