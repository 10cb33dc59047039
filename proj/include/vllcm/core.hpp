#pragma once

// Domain types shared by every stage of the harness: dataset items, derived
// probes, probability records and per-sample / per-dataset scores.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vllcm {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base of all recoverable data errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string sample_id, std::string rule);
  const std::string& sample_id() const { return sample_id_; }
  const std::string& rule() const { return rule_; }

 private:
  std::string sample_id_;
  std::string rule_;
};

class DerivationError : public Error {
 public:
  using Error::Error;
};

class PairingError : public Error {
 public:
  PairingError(std::string category, const std::string& what);
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

// ---------------------------------------------------------------------------
// Dataset items
// ---------------------------------------------------------------------------

enum class Format { mc, nb };

/// Which diagonal of a two-image/two-text unit is correct. `straight` means
/// V1-T1 and V2-T2 match; `crossed` means V1-T2 and V2-T1 match.
enum class Pairing { straight, crossed };

std::string_view to_string(Format f);
std::string_view to_string(Pairing p);
Format parse_format(std::string_view s);
Pairing parse_pairing(std::string_view s);

/// One multiple-choice VQA sample.
struct McItem {
  std::string id;
  std::string image;
  std::string question;
  std::vector<std::string> choices;
  std::optional<std::size_t> gt_index;
  std::optional<std::string> category;

  bool operator==(const McItem&) const = default;
};

/// Two images and two texts with alternating answers.
struct NbUnit {
  std::string id;
  std::array<std::string, 2> images;
  std::array<std::string, 2> texts;
  std::optional<Pairing> gt_pairing;
  std::optional<std::string> category;

  bool operator==(const NbUnit&) const = default;
};

using Manifest = std::variant<std::vector<McItem>, std::vector<NbUnit>>;

// ---------------------------------------------------------------------------
// Derived probes
// ---------------------------------------------------------------------------

enum class TestKind { mc, yn };

std::string_view to_string(TestKind k);
TestKind parse_test_kind(std::string_view s);

/// Names one probe within a sample. Text form: "mc_main", "yn_choice(k)" with
/// k 0-based, "nb_a" .. "nb_d", "nb_yn(i,j)" with image i and text j 1-based.
struct Subtest {
  enum class Tag { mc_main, yn_choice, nb_a, nb_b, nb_c, nb_d, nb_yn };

  Tag tag = Tag::mc_main;
  std::size_t first = 0;   // choice index for yn_choice, image index for nb_yn
  std::size_t second = 0;  // text index for nb_yn

  static Subtest mc_main() { return {Tag::mc_main, 0, 0}; }
  static Subtest yn_choice(std::size_t k) { return {Tag::yn_choice, k, 0}; }
  static Subtest nb_yn(std::size_t image, std::size_t text) { return {Tag::nb_yn, image, text}; }
  static Subtest nb_mc(char letter);

  std::string str() const;
  static Subtest parse(std::string_view s);

  bool operator==(const Subtest&) const = default;
};

struct DerivedTest {
  std::string test_id;
  std::string sample_id;
  TestKind kind = TestKind::mc;
  Subtest subtest;
  std::size_t arity = 0;

  bool operator==(const DerivedTest&) const = default;
};

/// test_id is a pure function of the parent id and the subtest.
std::string make_test_id(std::string_view sample_id, const Subtest& subtest);

/// Model output for one probe. For yn probes `probs` holds the single
/// yes-probability; for mc probes one entry per presented option.
struct ProbRecord {
  std::string test_id;
  std::string sample_id;
  std::vector<double> probs;
  std::map<std::string, std::string> meta;

  bool operator==(const ProbRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

enum class ResponseClass { abstention, confidence, overconfidence };

std::string_view to_string(ResponseClass c);
ResponseClass parse_response_class(std::string_view s);

struct SampleScore {
  std::string sample_id;
  Format format = Format::mc;
  double p_lc = 0.0;
  std::optional<double> p_lc_gt;
  // MC: argmax choice. NB: 0 for the straight pairing, 1 for crossed.
  std::size_t chosen_index = 0;
  double p_mc_chosen = 0.0;
  double p_jyn_chosen = 0.0;
  std::optional<ResponseClass> response_class;  // mc only
  std::optional<bool> mc_correct;
  std::optional<bool> jyn_correct;
  std::optional<std::array<double, 4>> subscores;  // nb only, tests a..d
  // Whether chosen_index equals the gt answer. Present iff gt present.
  std::optional<bool> chosen_correct;
  // nb only: how many of the four yes/no probes were answered correctly.
  std::optional<std::size_t> probe_hits;

  bool operator==(const SampleScore&) const = default;
};

struct DatasetSummary {
  std::string model;
  std::string dataset;
  std::size_t n_samples = 0;
  std::optional<double> acc;
  std::optional<double> j_acc;
  std::optional<double> f1;
  double lcm = 0.0;
  std::optional<double> lcm_gt;
  std::optional<double> ratio_lcm_gt;
  std::optional<double> abstention_rate;
  std::optional<double> confidence_rate;
  std::optional<double> overconfidence_rate;
  std::size_t n_r = 0;
  std::optional<std::size_t> n_rgt;
  std::optional<double> reliable_precision;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string sample_id;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_manifest(const std::vector<McItem>& items);
std::vector<Violation> validate_manifest(const std::vector<NbUnit>& units);
std::vector<Violation> validate_manifest(const Manifest& manifest);

/// Probabilities within 1e-9 of [0,1] are clamped; anything further out is
/// rejected.
inline constexpr double kProbSlack = 1e-9;

/// Returns the clamped value, or nullopt when `p` lies outside the slack band
/// (or is NaN).
std::optional<double> clamp_probability(double p);

}  // namespace vllcm
