#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "relearn/cube.hpp"
#include "relearn/serialize.hpp"

namespace relearn {

/// splitmix64 finaliser; used to derive independent stage seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded mt19937_64 with a portable 53-bit uniform double.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  /// Uniform in [0, 1): (next() >> 11) * 2^-53.
  double uniform();
  int sign() { return (next() >> 63) ? 1 : -1; }
  CubePoint point(int n);

 private:
  std::mt19937_64 gen_;
};

/// Stage offsets XORed into the run seed before splitmix64.
enum class Stage : std::uint64_t {
  Train = 0x7472'6169'6e00'0001ULL,
  Calibration = 0x6361'6c69'6200'0002ULL,
  Test = 0x7465'7374'0000'0003ULL,
  Rounding = 0x726f'756e'6400'0004ULL,
};
std::uint64_t stage_seed(std::uint64_t seed, Stage stage);

/// One row of an explicit joint distribution over (x, y).
struct TableEntry {
  CubePoint x;
  int y = 1;
  double prob = 0.0;
};

struct NoiseModel {
  enum class Kind { None, OneSidedPositive, OneSidedNegative, Symmetric, AdversarialTable };
  Kind kind = Kind::None;
  double eta = 0.0;
  std::vector<TableEntry> table;

  static NoiseModel none() { return {}; }
  static NoiseModel one_sided_positive(double eta) { return {Kind::OneSidedPositive, eta, {}}; }
  static NoiseModel one_sided_negative(double eta) { return {Kind::OneSidedNegative, eta, {}}; }
  static NoiseModel symmetric(double eta) { return {Kind::Symmetric, eta, {}}; }
  /// Probabilities must be nonnegative and sum to 1 (within 1e-9).
  static NoiseModel adversarial_table(std::vector<TableEntry> table);
};

Json to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const Json& j);

/// m examples: x uniform on the cube (or drawn from the table), labelled by c
/// and then passed through the noise model. one_sided_positive turns some
/// c = -1 labels into +1 and never the reverse; one_sided_negative mirrors it.
LabeledSample generate(const Concept& c, const NoiseModel& noise, std::size_t m, std::uint64_t seed);

/// Exact metrics of h under an explicit joint table.
ErrorMetrics population_metrics(const PartialHypothesis& h, const std::vector<TableEntry>& table);

/// Every majority over a nonempty subset of x1..xn plus both constants.
std::vector<Concept> majority_bank(int n, int max_n = 14);
/// Every monotone disjunction over a subset of x1..xn (the empty one is -1)
/// plus the constant +1.
std::vector<Concept> monotone_disjunction_bank(int n, int max_n = 20);

enum class OptMode { Positive, Negative, Fully };
std::string to_string(OptMode m);
OptMode parse_opt_mode(const std::string& text);

struct OptResult {
  double value = 0.0;
  /// One concept for the reliable modes, (c+, c-) for the fully mode.
  std::vector<Concept> argmin;
};

/// Exhaustive search over the bank. Positive: min empirical false_- among
/// members with empirical false_+ = 0. Negative: the mirror. Fully: min
/// unknown rate over pairs whose agreement classifier makes no error. Ties
/// go to the lexicographically smallest concept text.
OptResult brute_opt(const LabeledSample& s, const std::vector<Concept>& bank, OptMode mode,
                    std::size_t max_bank = 1u << 20);

/// Run directory root: $RELEARN_RUNS if set, else ./runs.
std::filesystem::path default_runs_root();

/// FNV-1a 64 over the bytes, as 16 hex digits.
std::string content_hash(const std::string& bytes);

struct RunOutcome {
  Json manifest;  // input plus results
  Json result;
  std::filesystem::path dir;
};

/// Input manifest keys: seed, concept, noise, learner {kind, d, W, eps,
/// sign}, sizes {train, calibration, test}, bank, slack. Runs generate ->
/// learn -> held-out evaluation -> brute_opt and persists manifest.json,
/// result.json, hypothesis.json and sample.csv under root/<hash of input>.
/// Stage errors are recorded in the result rather than thrown.
RunOutcome run_experiment(const Json& manifest_in, const std::filesystem::path& root);

/// Re-executes dir/manifest.json without writing and reports whether the
/// result serialises to the same bytes as dir/result.json.
struct ReplayOutcome {
  bool identical = false;
  std::string stored;
  std::string replayed;
};
ReplayOutcome replay(const std::filesystem::path& dir);

/// Serialised form written to result.json.
std::string result_bytes(const Json& result);

/// Appends one row per run to a CSV table, writing the header when the file
/// is new.
void append_summary(const std::filesystem::path& csv, const RunOutcome& run);

}  // namespace relearn
