#include "vllcm/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

namespace vllcm {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(column > 0 ? fmt::format("line {}, column {}: {}", line, column, what)
                       : fmt::format("line {}: {}", line, what)),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::string sample_id, std::string rule)
    : Error(fmt::format("sample '{}': {}", sample_id, rule)),
      sample_id_(std::move(sample_id)),
      rule_(std::move(rule)) {}

PairingError::PairingError(std::string category, const std::string& what)
    : Error(fmt::format("category '{}': {}", category, what)), category_(std::move(category)) {}

std::string_view to_string(Format f) { return f == Format::mc ? "mc" : "nb"; }

std::string_view to_string(Pairing p) { return p == Pairing::straight ? "straight" : "crossed"; }

Format parse_format(std::string_view s) {
  if (s == "mc") return Format::mc;
  if (s == "nb") return Format::nb;
  throw Error(fmt::format("unknown format '{}'", s));
}

Pairing parse_pairing(std::string_view s) {
  if (s == "straight") return Pairing::straight;
  if (s == "crossed") return Pairing::crossed;
  throw Error(fmt::format("unknown pairing '{}'", s));
}

std::string_view to_string(TestKind k) { return k == TestKind::mc ? "mc" : "yn"; }

TestKind parse_test_kind(std::string_view s) {
  if (s == "mc") return TestKind::mc;
  if (s == "yn") return TestKind::yn;
  throw Error(fmt::format("unknown test kind '{}'", s));
}

std::string_view to_string(ResponseClass c) {
  switch (c) {
    case ResponseClass::abstention: return "abstention";
    case ResponseClass::confidence: return "confidence";
    case ResponseClass::overconfidence: return "overconfidence";
  }
  return "";
}

ResponseClass parse_response_class(std::string_view s) {
  if (s == "abstention") return ResponseClass::abstention;
  if (s == "confidence") return ResponseClass::confidence;
  if (s == "overconfidence") return ResponseClass::overconfidence;
  throw Error(fmt::format("unknown response class '{}'", s));
}

// ---------------------------------------------------------------------------
// Subtest
// ---------------------------------------------------------------------------

Subtest Subtest::nb_mc(char letter) {
  switch (letter) {
    case 'a': return {Tag::nb_a, 0, 0};
    case 'b': return {Tag::nb_b, 0, 0};
    case 'c': return {Tag::nb_c, 0, 0};
    case 'd': return {Tag::nb_d, 0, 0};
    default: throw Error(fmt::format("unknown nb subtest letter '{}'", letter));
  }
}

std::string Subtest::str() const {
  switch (tag) {
    case Tag::mc_main: return "mc_main";
    case Tag::yn_choice: return fmt::format("yn_choice({})", first);
    case Tag::nb_a: return "nb_a";
    case Tag::nb_b: return "nb_b";
    case Tag::nb_c: return "nb_c";
    case Tag::nb_d: return "nb_d";
    case Tag::nb_yn: return fmt::format("nb_yn({},{})", first, second);
  }
  return {};
}

namespace {

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Strips "name(" and ")" from s, returning the argument text.
std::optional<std::string_view> call_args(std::string_view s, std::string_view name) {
  if (s.size() < name.size() + 2 || s.substr(0, name.size()) != name || s[name.size()] != '(' ||
      s.back() != ')')
    return std::nullopt;
  return s.substr(name.size() + 1, s.size() - name.size() - 2);
}

}  // namespace

Subtest Subtest::parse(std::string_view s) {
  if (s == "mc_main") return mc_main();
  if (s == "nb_a") return nb_mc('a');
  if (s == "nb_b") return nb_mc('b');
  if (s == "nb_c") return nb_mc('c');
  if (s == "nb_d") return nb_mc('d');
  if (auto args = call_args(s, "yn_choice")) {
    if (auto k = parse_index(*args)) return yn_choice(*k);
  }
  if (auto args = call_args(s, "nb_yn")) {
    auto comma = args->find(',');
    if (comma != std::string_view::npos) {
      auto i = parse_index(args->substr(0, comma));
      auto j = parse_index(args->substr(comma + 1));
      if (i && j && (*i == 1 || *i == 2) && (*j == 1 || *j == 2)) return nb_yn(*i, *j);
    }
  }
  throw Error(fmt::format("unknown subtest '{}'", s));
}

std::string make_test_id(std::string_view sample_id, const Subtest& subtest) {
  return fmt::format("{}#{}", sample_id, subtest.str());
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<Violation> validate_manifest(const std::vector<McItem>& items) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen;
  for (const auto& item : items) {
    auto flag = [&](std::string rule) { out.push_back({item.id, std::move(rule)}); };
    if (item.id.empty()) flag("id must be non-empty");
    if (!seen.insert(item.id).second) flag("duplicate id");
    if (item.choices.size() < 2) flag("at least 2 choices required");
    for (std::size_t k = 0; k < item.choices.size(); ++k) {
      if (item.choices[k].empty()) flag(fmt::format("choice {} is empty", k));
    }
    if (item.gt_index && *item.gt_index >= item.choices.size()) flag("gt_index out of range");
  }
  return out;
}

std::vector<Violation> validate_manifest(const std::vector<NbUnit>& units) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen;
  for (const auto& unit : units) {
    auto flag = [&](std::string rule) { out.push_back({unit.id, std::move(rule)}); };
    if (unit.id.empty()) flag("id must be non-empty");
    if (!seen.insert(unit.id).second) flag("duplicate id");
    if (unit.images[0] == unit.images[1]) flag("images must be distinct");
    if (unit.texts[0] == unit.texts[1]) flag("texts must be distinct");
    if (unit.texts[0].empty() || unit.texts[1].empty()) flag("texts must be non-empty");
  }
  return out;
}

std::vector<Violation> validate_manifest(const Manifest& manifest) {
  return std::visit([](const auto& items) { return validate_manifest(items); }, manifest);
}

std::optional<double> clamp_probability(double p) {
  if (std::isnan(p) || p < -kProbSlack || p > 1.0 + kProbSlack) return std::nullopt;
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace vllcm
