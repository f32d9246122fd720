// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "relearn/certify.hpp"
#include "relearn/constructions.hpp"
#include "relearn/errors.hpp"
#include "relearn/harness.hpp"
#include "relearn/learn.hpp"

using namespace relearn;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInfty = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %-34s %7.2fs %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.str().c_str());
  std::fflush(stdout);
}

Concept majority(int n) {
  std::vector<int> v;
  for (int i = 1; i <= n; ++i) v.push_back(i);
  return make_majority(n, v);
}

double clamp1(double a) { return a < -1 ? -1 : (a > 1 ? 1 : a); }

double scan_threshold(const SparsePolynomial& p, const LabeledSample& s, double eps) {
  std::vector<double> H(s.size());
  std::vector<double> cand{-kInfty, kInfty};
  for (std::size_t i = 0; i < s.size(); ++i) cand.push_back(H[i] = clamp1(p.evaluate(s.points[i])));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (double t : cand) {
    std::size_t fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) fp += s.labels[i] < 0 && H[i] > t;
    if (double(fp) / s.size() <= eps) return t;
  }
  return kInfty;
}

struct Planted {
  LabeledSample train, cal, test;
};

Planted planted_maj9(std::uint64_t seed) {
  const Concept c = majority(9);
  const NoiseModel noise = NoiseModel::one_sided_positive(0.1);
  return {generate(c, noise, 20000, stage_seed(seed, Stage::Train)),
          generate(c, noise, 5000, stage_seed(seed, Stage::Calibration)),
          generate(c, noise, 20000, stage_seed(seed, Stage::Test))};
}

std::vector<SparsePolynomial> fitted;       // from criterion 7, reused by 10
std::vector<LabeledSample> calibrations;

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  criterion(1, "quarter construction sweep", [](Outcome& o) {
    const auto t0 = Clock::now();
    for (int n = 1; n <= 13; n += 2) {
      const Concept c = majority(n);
      const auto p = halfspace_pos_quarter(as_halfspace(c));
      const CertReport r = verify_onesided(p, c, 0.25, Sign::Positive);
      o.require(r.ok && r.points == (1ull << n), "MAJ_" + std::to_string(n) + " certificate");
      CubeEvaluator ev(p);
      for (std::uint64_t i = 0; i < (1ull << n); ++i) {
        const CubePoint x = CubePoint::from_index(n, i);
        if (c(x) < 0) {
          const double v = ev(x);
          if (v < -1 - 1e-9 || v > -0.75 + 1e-9) o.require(false, "negative image outside [-1,-3/4]");
        }
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(secs < 30, "runtime");
    o.detail << "n=1..13 odd, all 2^n points";
  });

  criterion(2, "Kahn S_k identities", [](Outcome& o) {
    const long long W = 20;
    Rational prev = -1;
    for (int k : {8, 12, 16}) {
      const KahnParams p = default_kahn_params(W, k);
      const UniPoly S = kahn_sk(p);
      o.require(S(Rational(static_cast<long>(W))) == 1, "S_k(W) = 1");
      for (int i = 0; i <= p.a; ++i) o.require(S(Rational(i)) == 0, "root " + std::to_string(i));
      for (long long j = W - p.b; j < W; ++j) o.require(S(Rational(static_cast<long>(j))) == 0, "root");
      Rational M = 0;
      for (int t = 0; t < W; ++t) M = std::max(M, Rational(abs(S(Rational(t)))));
      if (prev >= 0) o.require(M < prev, "M(k) decreasing");
      prev = M;
      o.detail << "M(" << k << ")=" << to_double(M) << " ";
    }
  });

  criterion(3, "eps construction MAJ_9", [](Outcome& o) {
    const Approximant a = halfspace_onesided_eps(majority(9), Sign::Positive, 0.1);
    o.require(a.certified, "certified");
    o.require(a.certificate && a.certificate->points == 512, "512 points");
    o.require(a.certificate && a.certificate->worst_pos <= 0 && a.certificate->worst_neg <= 0, "worst <= 0");
    o.require(!a.tried.empty() && a.k == a.tried.back(), "k on schedule");
    o.detail << "k=" << a.k << " schedule tried " << a.tried.size() << " worst_pos=" << a.certificate->worst_pos
             << " worst_neg=" << a.certificate->worst_neg;
  });

  criterion(4, "OR/AND composition", [](Outcome& o) {
    const Concept left = parse_concept("MAJ 1 2 3", 6), right = parse_concept("MAJ 4 5 6", 6);
    const Concept orf = parse_concept("DNF (+1 +2)(+1 +3)(+2 +3)(+4 +5)(+4 +6)(+5 +6)");
    const Concept andf = parse_concept("CNF (+1 +2)(+1 +3)(+2 +3)(+4 +5)(+4 +6)(+5 +6)");
    for (Sign sign : {Sign::Positive, Sign::Negative}) {
      const Approximant a = halfspace_onesided_eps(left, sign, 0.125);
      const Approximant b = halfspace_onesided_eps(right, sign, 0.125);
      const bool pos = sign == Sign::Positive;
      const auto p = pos ? or_compose({a.poly, b.poly}) : and_compose({a.poly, b.poly});
      const CertReport r = verify_onesided(p, pos ? orf : andf, 0.25, sign);
      o.require(r.ok && r.points == 64, pos ? "OR certificate" : "AND certificate");
      const SparsePolynomial ea = expand(a.poly), eb = expand(b.poly), ep = expand(p);
      o.require(ep.degree() == std::max(ea.degree(), eb.degree()), "degree is max of parts");
      o.require(ep.weight() <= ea.weight() + eb.weight() + 1, "additive weight");
      o.detail << (pos ? "OR" : "AND") << " deg " << ep.degree() << " weight " << to_double(ep.weight()) << " ";
    }
  });

  criterion(5, "AND_n and DNF tradeoffs", [](Outcome& o) {
    const Approximant a = and_n_tradeoff(8, 5, 0.25);
    o.require(a.certified && a.certificate->points == 256, "AND_8");
    const Concept f = parse_concept("DNF (+1 +2 +3)(+4 +5 +6)");
    const Approximant b = dnf_pos_onesided(f, 3, 0.25);
    o.require(b.certified && b.certificate->points == 64, "DNF");
    o.detail << "AND_8 d=5 t=" << choose_blocking(8, 5, 0.25) << " k=" << a.k << "; DNF d=3";
  });

  criterion(6, "LP oracle invariants", [](Outcome& o) {
    std::vector<Concept> bank;
    for (int n = 2; n <= 4; ++n) bank.push_back(make_or(n, n));
    for (int n = 2; n <= 4; ++n) bank.push_back(make_and(n, n));
    bank.push_back(majority(3));
    bank.push_back(majority(5));
    const double tol = 1e-7;
    for (const Concept& f : bank) {
      const std::string name = to_string(f);
      double prev[3] = {kInfty, kInfty, kInfty};
      for (int d = 1; d <= 3; ++d) {
        double e[3];
        int i = 0;
        for (ApproxMode m : {ApproxMode::Positive, ApproxMode::Negative, ApproxMode::TwoSided}) {
          e[i] = min_eps(f, d, m).eps;
          o.require(e[i] <= prev[i] + tol, name + " monotone in d");
          prev[i] = e[i];
          ++i;
        }
        o.require(e[0] <= e[2] + tol && e[1] <= e[2] + tol, name + " relaxation order");
      }
      for (ApproxMode m : {ApproxMode::Positive, ApproxMode::Negative, ApproxMode::TwoSided}) {
        o.require(std::abs(min_eps(f, f.dimension(), m).eps) <= tol, name + " exact at d = n");
      }
    }
    for (int n = 2; n <= 4; ++n) {
      std::vector<SparsePolynomial::Term> t{{0, n - 1}};
      for (int i = 0; i < n; ++i) t.push_back({Monomial{1} << i, 1});
      o.require(verify_onesided(SparsePolynomial(n, t), make_or(n, n), 0.0, Sign::Positive).ok, "OR witness");
      o.require(std::abs(min_eps(make_or(n, n), 1, ApproxMode::Positive).eps) <= tol, "OR_n positive d=1");
    }
    const double or2 = min_eps(make_or(2, 2), 1, ApproxMode::Negative).eps;
    o.require(or2 > 0.05, "OR_2 negative > 0.05");
    o.require(std::abs(or2 - 0.5) <= tol, "OR_2 negative fixture 1/2");
    o.detail << "8 concepts x d=1..3; OR_2 negative d=1 eps*=" << or2;
  });

  criterion(7, "positive reliable learning MAJ_9", [](Outcome& o) {
    const Concept c = majority(9);
    const double W = to_double(expand(halfspace_exact(as_halfspace(c))).weight());
    const auto bank = majority_bank(9);
    const auto t0 = Clock::now();
    double worst_fp = 0, worst_gap = -kInfty;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Planted s = planted_maj9(seed);
      const auto r = learn_reliable(s.train, 9, W, 0.1, Sign::Positive, s.cal);
      const ErrorMetrics e = empirical_metrics(r.h.as_partial(), s.test);
      const double opt = brute_opt(s.test, bank, OptMode::Positive).value;
      worst_fp = std::max(worst_fp, e.false_pos);
      worst_gap = std::max(worst_gap, e.false_neg - opt);
      o.require(e.false_pos <= 0.15, "seed " + std::to_string(seed) + " false_pos");
      o.require(e.false_neg <= opt + 0.15, "seed " + std::to_string(seed) + " false_neg");
      fitted.push_back(r.h.p);
      calibrations.push_back(s.cal);
      calibrations.push_back(s.test);
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(secs < 300, "runtime");
    o.detail << "W=" << W << " 5 seeds: max false_pos " << worst_fp << ", max false_neg - opt+ " << worst_gap;
  });

  criterion(8, "disjunction eliminator n=30", [](Outcome& o) {
    const Concept c = parse_concept("DISJ +3 +8 +14 +21 +27", 30);
    double worst_fp = 0, worst_gap = -kInfty;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const NoiseModel noise = NoiseModel::one_sided_positive(0.05);
      const LabeledSample train = generate(c, noise, 5000, stage_seed(seed, Stage::Train));
      const LabeledSample test = generate(c, noise, 5000, stage_seed(seed, Stage::Test));
      const ErrorMetrics e = empirical_metrics(PartialHypothesis::from_concept(learn_disjunction_positive(train)), test);
      const double planted = empirical_metrics(PartialHypothesis::from_concept(c), test).false_neg;
      worst_fp = std::max(worst_fp, e.false_pos);
      worst_gap = std::max(worst_gap, e.false_neg - planted);
      o.require(e.false_pos <= 0.02, "seed " + std::to_string(seed) + " false_pos");
      o.require(e.false_neg <= planted + 0.05, "seed " + std::to_string(seed) + " false_neg");
    }
    o.detail << "5 seeds: max false_pos " << worst_fp << ", max false_neg - planted " << worst_gap;
  });

  criterion(9, "fully reliable MAJ_9", [](Outcome& o) {
    const Concept c = majority(9);
    const double W = to_double(expand(halfspace_exact(as_halfspace(c))).weight());
    const auto bank = majority_bank(9);
    double worst_err = 0, worst_gap = -kInfty;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Planted s = planted_maj9(seed);
      const auto r = learn_fully_reliable(s.train, {9, W, 0.1}, s.cal);
      const ErrorMetrics e = empirical_metrics(r.h, s.test);
      const double opt = brute_opt(s.test, bank, OptMode::Fully).value;
      worst_err = std::max(worst_err, e.err);
      worst_gap = std::max(worst_gap, e.unknown_rate - opt);
      o.require(e.err <= 0.15, "seed " + std::to_string(seed) + " err");
      o.require(e.unknown_rate <= opt + 0.2, "seed " + std::to_string(seed) + " unknown_rate");
    }
    o.detail << "eps/4 per side, 5 seeds: max err " << worst_err << ", max unknown - opt? " << worst_gap;
  });

  criterion(10, "rounding and derandomization", [](Outcome& o) {
    o.require(!fitted.empty(), "needs the fits from criterion 7");
    if (fitted.empty()) return;
    Rng probe(stage_seed(10, Stage::Rounding));
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const CubePoint x = probe.point(9);
      const SparsePolynomial& p = fitted[static_cast<std::size_t>(i) % fitted.size()];
      Rng u(stage_seed(1000 + i, Stage::Rounding));
      double sum = 0;
      for (int k = 0; k < 10000; ++k) sum += randomized_round(p, x, u.uniform());
      worst = std::max(worst, std::abs(sum / 10000 - chop(p.evaluate(x))));
    }
    o.require(worst <= 0.02, "rounding mean");
    std::size_t checked = 0;
    for (std::size_t i = 0; i < calibrations.size(); ++i) {
      const SparsePolynomial& p = fitted[i / 2];
      for (double eps : {0.05, 0.1}) {
        const auto h = derandomize(p, calibrations[i], eps);
        o.require(h.threshold == scan_threshold(p, calibrations[i], eps), "t* matches scan");
        ++checked;
      }
    }
    o.detail << "max |mean - chop| " << worst << "; " << checked << " threshold scans agree";
  });

  criterion(11, "formula fidelity", [](Outcome& o) {
    struct P {
      int n, d;
      double W, eps, delta;
    };
    const P grid[10] = {{1, 1, 1, 1.0, 0.5},     {10, 1, 2, 0.5, 0.1},   {10, 2, 5, 0.2, 0.05},
                        {30, 3, 10, 0.1, 0.01},  {100, 3, 10, 0.1, 0.01}, {9, 9, 10.375, 0.1, 0.05},
                        {50, 2, 1.5, 0.3, 0.2},  {200, 4, 40, 0.05, 0.001}, {5, 5, 3, 0.9, 0.9},
                        {1000, 2, 7, 0.25, 0.02}};
    double worst_rel = 0, worst_alpha = 0;
    for (const P& g : grid) {
      const double t1 = 512 / (g.eps * g.eps * g.eps * g.eps) * g.W * g.W * g.d * std::log(2.0 * g.n);
      const double t2 = 64 / (g.eps * g.eps) * (g.W + 1) * (g.W + 1) * std::log(1 / g.delta);
      const SamplePlan pl = plan_samples(g.n, g.d, g.W, g.eps, g.delta);
      const double m = static_cast<double>(pl.m);
      worst_rel = std::max({worst_rel, std::abs(pl.term_rademacher - t1) / t1, std::abs(pl.term_confidence - t2) / t2});
      o.require(pl.m == static_cast<long long>(std::ceil(std::max(t1, t2))), "m = ceil(max)");
      const double R = g.W * std::sqrt(2.0 * g.d * std::log(2.0 * g.n) / m);
      worst_rel = std::max(worst_rel, std::abs(rademacher_bound(g.W, g.d, g.n, m) - R) / R);
      const double alpha = 4 / g.eps * R + 2 * (g.W + 1) * std::sqrt(std::log(1 / g.delta) / (2 * m));
      worst_alpha = std::max(worst_alpha, alpha / (g.eps / 2));
      o.require(alpha <= g.eps / 2, "alpha <= eps/2");
    }
    o.require(worst_rel <= 1e-9, "relative agreement");
    o.detail << "10 points: max rel err " << worst_rel << ", max alpha/(eps/2) " << worst_alpha;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
