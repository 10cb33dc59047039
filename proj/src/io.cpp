#include "vllcm/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace vllcm::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Line-level helpers
// ---------------------------------------------------------------------------

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

// Calls fn(object, line_number) for every non-blank line. JSON syntax and
// type errors surface as ParseError.
template <class Fn>
void for_each_record(std::istream& in, Fn fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("invalid JSON: {}", e.what()), number, e.byte);
    }
    if (!record.is_object()) throw ParseError("record must be a JSON object", number);
    try {
      fn(record, number);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), number);
    }
  }
}

const json& require(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    throw ParseError(fmt::format("missing field '{}'", key), line);
  }
  return *it;
}

std::string require_string(const json& j, const char* key, std::size_t line) {
  const json& v = require(j, key, line);
  if (!v.is_string()) throw ParseError(fmt::format("field '{}' must be a string", key), line);
  return v.get<std::string>();
}

std::size_t require_index(const json& v, const char* key, std::size_t line) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(fmt::format("field '{}' must be a non-negative integer", key), line);
  }
  return v.get<std::size_t>();
}

double require_number(const json& v, const char* key, std::size_t line) {
  if (!v.is_number()) throw ParseError(fmt::format("field '{}' must be a number", key), line);
  return v.get<double>();
}

bool require_bool(const json& v, const char* key, std::size_t line) {
  if (!v.is_boolean()) throw ParseError(fmt::format("field '{}' must be a boolean", key), line);
  return v.get<bool>();
}

std::optional<std::string> optional_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(fmt::format("field '{}' must be a string", key), line);
  return it->get<std::string>();
}

const json* optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

std::array<std::string, 2> require_string_pair(const json& j, const char* key, std::size_t line) {
  const json& v = require(j, key, line);
  if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string()) {
    throw ParseError(fmt::format("field '{}' must be an array of 2 strings", key), line);
  }
  return {v[0].get<std::string>(), v[1].get<std::string>()};
}

// Rethrows any library Error from a conversion as a ParseError at `line`.
template <class Fn>
auto at_line(std::size_t line, Fn fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
}

// ---------------------------------------------------------------------------
// Record conversions
// ---------------------------------------------------------------------------

McItem mc_item_from_json(const json& j, std::size_t line) {
  McItem item;
  item.id = require_string(j, "id", line);
  item.image = require_string(j, "image", line);
  item.question = require_string(j, "question", line);
  const json& choices = require(j, "choices", line);
  if (!choices.is_array()) throw ParseError("field 'choices' must be an array", line);
  for (const auto& c : choices) {
    if (!c.is_string()) throw ParseError("field 'choices' must hold strings", line);
    item.choices.push_back(c.get<std::string>());
  }
  if (const json* gt = optional_field(j, "gt_index")) {
    item.gt_index = require_index(*gt, "gt_index", line);
  }
  item.category = optional_string(j, "category", line);
  return item;
}

ordered_json to_json(const McItem& item) {
  ordered_json j;
  j["id"] = item.id;
  j["image"] = item.image;
  j["question"] = item.question;
  j["choices"] = item.choices;
  if (item.gt_index) j["gt_index"] = *item.gt_index;
  if (item.category) j["category"] = *item.category;
  return j;
}

NbUnit nb_unit_from_json(const json& j, std::size_t line) {
  NbUnit unit;
  unit.id = require_string(j, "id", line);
  unit.images = require_string_pair(j, "images", line);
  unit.texts = require_string_pair(j, "texts", line);
  if (auto p = optional_string(j, "gt_pairing", line)) {
    unit.gt_pairing = at_line(line, [&] { return parse_pairing(*p); });
  }
  unit.category = optional_string(j, "category", line);
  return unit;
}

ordered_json to_json(const NbUnit& unit) {
  ordered_json j;
  j["id"] = unit.id;
  j["images"] = unit.images;
  j["texts"] = unit.texts;
  if (unit.gt_pairing) j["gt_pairing"] = std::string(to_string(*unit.gt_pairing));
  if (unit.category) j["category"] = *unit.category;
  return j;
}

ordered_json to_json(const DerivedTest& t) {
  ordered_json j;
  j["test_id"] = t.test_id;
  j["sample_id"] = t.sample_id;
  j["kind"] = std::string(to_string(t.kind));
  j["subtest"] = t.subtest.str();
  j["arity"] = t.arity;
  return j;
}

ordered_json to_json(const ProbRecord& r) {
  ordered_json j;
  j["test_id"] = r.test_id;
  j["sample_id"] = r.sample_id;
  j["probs"] = r.probs;
  if (!r.meta.empty()) {
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : r.meta) meta[k] = v;
    j["meta"] = std::move(meta);
  }
  return j;
}

ordered_json to_json(const SampleScore& s) {
  ordered_json j;
  j["sample_id"] = s.sample_id;
  j["format"] = std::string(to_string(s.format));
  j["p_lc"] = s.p_lc;
  if (s.p_lc_gt) j["p_lc_gt"] = *s.p_lc_gt;
  j["chosen_index"] = s.chosen_index;
  j["p_mc_chosen"] = s.p_mc_chosen;
  j["p_jyn_chosen"] = s.p_jyn_chosen;
  if (s.response_class) j["response_class"] = std::string(to_string(*s.response_class));
  if (s.mc_correct) j["mc_correct"] = *s.mc_correct;
  if (s.jyn_correct) j["jyn_correct"] = *s.jyn_correct;
  if (s.subscores) j["subscores"] = *s.subscores;
  if (s.chosen_correct) j["chosen_correct"] = *s.chosen_correct;
  if (s.probe_hits) j["probe_hits"] = *s.probe_hits;
  return j;
}

template <class Record>
void write_lines(std::ostream& out, std::span<const Record> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

namespace {

Manifest parse_manifest_lines(std::istream& in, Format format,
                              std::map<std::string, std::size_t>& lines) {
  if (format == Format::mc) {
    std::vector<McItem> items;
    for_each_record(in, [&](const json& j, std::size_t line) {
      items.push_back(mc_item_from_json(j, line));
      lines.emplace(items.back().id, line);
    });
    return items;
  }
  std::vector<NbUnit> units;
  for_each_record(in, [&](const json& j, std::size_t line) {
    units.push_back(nb_unit_from_json(j, line));
    lines.emplace(units.back().id, line);
  });
  return units;
}

}  // namespace

Manifest parse_manifest(std::istream& in, Format format) {
  std::map<std::string, std::size_t> lines;
  return parse_manifest_lines(in, format, lines);
}

Manifest read_manifest(std::istream& in, Format format) {
  std::map<std::string, std::size_t> lines;  // id -> first line, for diagnostics
  Manifest manifest = parse_manifest_lines(in, format, lines);
  auto violations = validate_manifest(manifest);
  if (!violations.empty()) {
    const auto& v = violations.front();
    auto it = lines.find(v.sample_id);
    std::string rule = v.rule;
    if (it != lines.end() && v.rule != "duplicate id") {
      rule = fmt::format("{} (line {})", v.rule, it->second);
    }
    throw ValidationError(v.sample_id, rule);
  }
  return manifest;
}

Manifest load_manifest(const fs::path& path, Format format) {
  auto in = open_in(path);
  return read_manifest(in, format);
}

void write_manifest(std::ostream& out, const Manifest& manifest) {
  std::visit(
      [&](const auto& items) {
        using Item = typename std::decay_t<decltype(items)>::value_type;
        write_lines<Item>(out, items);
      },
      manifest);
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  auto out = open_out(path);
  write_manifest(out, manifest);
  finish(out, path);
}

std::vector<TfItem> read_tf_pool(std::istream& in) {
  std::vector<TfItem> pool;
  for_each_record(in, [&](const json& j, std::size_t line) {
    TfItem item;
    item.id = require_string(j, "id", line);
    item.image = require_string(j, "image", line);
    item.question = require_string(j, "question", line);
    item.answer = require_bool(require(j, "answer", line), "answer", line);
    item.category = require_string(j, "category", line);
    pool.push_back(std::move(item));
  });
  return pool;
}

std::vector<TfItem> load_tf_pool(const fs::path& path) {
  auto in = open_in(path);
  return read_tf_pool(in);
}

// ---------------------------------------------------------------------------
// Derived tests
// ---------------------------------------------------------------------------

std::vector<DerivedTest> read_tests(std::istream& in) {
  std::vector<DerivedTest> tests;
  for_each_record(in, [&](const json& j, std::size_t line) {
    DerivedTest t;
    t.test_id = require_string(j, "test_id", line);
    t.sample_id = require_string(j, "sample_id", line);
    const auto kind = require_string(j, "kind", line);
    const auto subtest = require_string(j, "subtest", line);
    t.kind = at_line(line, [&] { return parse_test_kind(kind); });
    t.subtest = at_line(line, [&] { return Subtest::parse(subtest); });
    t.arity = require_index(require(j, "arity", line), "arity", line);
    if (t.test_id != make_test_id(t.sample_id, t.subtest)) {
      throw ParseError(fmt::format("test_id '{}' does not match sample and subtest", t.test_id),
                       line);
    }
    tests.push_back(std::move(t));
  });
  return tests;
}

std::vector<DerivedTest> load_tests(const fs::path& path) {
  auto in = open_in(path);
  return read_tests(in);
}

void write_tests(std::ostream& out, std::span<const DerivedTest> tests) {
  write_lines(out, tests);
}

void write_tests(const fs::path& path, std::span<const DerivedTest> tests) {
  auto out = open_out(path);
  write_tests(out, tests);
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Probability records
// ---------------------------------------------------------------------------

std::vector<ProbRecord> read_probs(std::istream& in) {
  std::vector<ProbRecord> records;
  for_each_record(in, [&](const json& j, std::size_t line) {
    ProbRecord r;
    r.test_id = require_string(j, "test_id", line);
    r.sample_id = require_string(j, "sample_id", line);
    const json& probs = require(j, "probs", line);
    if (!probs.is_array() || probs.empty()) {
      throw ParseError("field 'probs' must be a non-empty array", line);
    }
    for (const auto& p : probs) {
      const double raw = require_number(p, "probs", line);
      auto clamped = clamp_probability(raw);
      if (!clamped) {
        throw ParseError(fmt::format("probability {} outside [0,1] in '{}'", raw, r.test_id), line);
      }
      r.probs.push_back(*clamped);
    }
    if (const json* meta = optional_field(j, "meta")) {
      if (!meta->is_object()) throw ParseError("field 'meta' must be an object", line);
      for (const auto& [k, v] : meta->items()) {
        if (!v.is_string()) throw ParseError("field 'meta' values must be strings", line);
        r.meta.emplace(k, v.get<std::string>());
      }
    }
    records.push_back(std::move(r));
  });
  if (records.empty()) spdlog::warn("probability file holds no records");
  return records;
}

std::vector<ProbRecord> load_probs(const fs::path& path) {
  auto in = open_in(path);
  return read_probs(in);
}

void write_probs(std::ostream& out, std::span<const ProbRecord> records) {
  write_lines(out, records);
}

void write_probs(const fs::path& path, std::span<const ProbRecord> records) {
  auto out = open_out(path);
  write_probs(out, records);
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

std::vector<SampleScore> read_scores(std::istream& in) {
  std::vector<SampleScore> scores;
  for_each_record(in, [&](const json& j, std::size_t line) {
    SampleScore s;
    s.sample_id = require_string(j, "sample_id", line);
    const auto format = require_string(j, "format", line);
    s.format = at_line(line, [&] { return parse_format(format); });
    s.p_lc = require_number(require(j, "p_lc", line), "p_lc", line);
    if (const json* v = optional_field(j, "p_lc_gt")) s.p_lc_gt = require_number(*v, "p_lc_gt", line);
    s.chosen_index = require_index(require(j, "chosen_index", line), "chosen_index", line);
    s.p_mc_chosen = require_number(require(j, "p_mc_chosen", line), "p_mc_chosen", line);
    s.p_jyn_chosen = require_number(require(j, "p_jyn_chosen", line), "p_jyn_chosen", line);
    if (auto rc = optional_string(j, "response_class", line)) {
      s.response_class = at_line(line, [&] { return parse_response_class(*rc); });
    }
    if (const json* v = optional_field(j, "mc_correct")) s.mc_correct = require_bool(*v, "mc_correct", line);
    if (const json* v = optional_field(j, "jyn_correct")) s.jyn_correct = require_bool(*v, "jyn_correct", line);
    if (const json* v = optional_field(j, "subscores")) {
      if (!v->is_array() || v->size() != 4) throw ParseError("field 'subscores' must hold 4 numbers", line);
      std::array<double, 4> sub{};
      for (std::size_t i = 0; i < 4; ++i) sub[i] = require_number((*v)[i], "subscores", line);
      s.subscores = sub;
    }
    if (const json* v = optional_field(j, "chosen_correct")) {
      s.chosen_correct = require_bool(*v, "chosen_correct", line);
    }
    if (const json* v = optional_field(j, "probe_hits")) s.probe_hits = require_index(*v, "probe_hits", line);
    scores.push_back(std::move(s));
  });
  return scores;
}

std::vector<SampleScore> load_scores(const fs::path& path) {
  auto in = open_in(path);
  return read_scores(in);
}

void write_scores(std::ostream& out, std::span<const SampleScore> scores) {
  write_lines(out, scores);
}

void write_scores(const fs::path& path, std::span<const SampleScore> scores) {
  auto out = open_out(path);
  write_scores(out, scores);
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Join
// ---------------------------------------------------------------------------

JoinResult join(const Manifest& manifest, std::span<const DerivedTest> tests,
                std::span<const ProbRecord> probs) {
  std::unordered_map<std::string, const DerivedTest*> test_by_id;
  for (const auto& t : tests) test_by_id.emplace(t.test_id, &t);

  std::unordered_map<std::string, const ProbRecord*> record_by_test;
  for (const auto& r : probs) {
    auto it = test_by_id.find(r.test_id);
    if (it == test_by_id.end()) throw Error(fmt::format("unknown test_id '{}'", r.test_id));
    const DerivedTest& t = *it->second;
    if (r.sample_id != t.sample_id) {
      throw Error(fmt::format("record '{}' names sample '{}' but the test belongs to '{}'",
                              r.test_id, r.sample_id, t.sample_id));
    }
    if (r.probs.size() != t.arity) {
      throw Error(fmt::format("arity mismatch for '{}': expected {}, got {}", r.test_id, t.arity,
                              r.probs.size()));
    }
    for (double p : r.probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(fmt::format("probability outside [0,1] in '{}'", r.test_id));
    }
    if (!record_by_test.emplace(r.test_id, &r).second) {
      throw Error(fmt::format("duplicate record for '{}'", r.test_id));
    }
  }

  JoinResult result;
  result.format = std::holds_alternative<std::vector<McItem>>(manifest) ? Format::mc : Format::nb;

  // Looks up every expected probe; returns false and records the sample as
  // excluded when any is missing.
  auto gather = [&](const std::string& sample_id, const std::vector<DerivedTest>& expected,
                    std::vector<const ProbRecord*>& found) {
    ExcludedSample missing{sample_id, {}};
    found.clear();
    for (const auto& t : expected) {
      auto it = record_by_test.find(t.test_id);
      if (it == record_by_test.end()) {
        missing.missing_tests.push_back(t.test_id);
        found.push_back(nullptr);
      } else {
        found.push_back(it->second);
      }
    }
    if (!missing.missing_tests.empty()) {
      result.excluded.push_back(std::move(missing));
      return false;
    }
    return true;
  };

  std::vector<const ProbRecord*> found;
  if (const auto* items = std::get_if<std::vector<McItem>>(&manifest)) {
    std::vector<const McItem*> sorted;
    for (const auto& item : *items) sorted.push_back(&item);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const McItem* item : sorted) {
      if (!gather(item->id, derive_mc_suite(*item), found)) continue;
      McProbBundle b;
      b.sample_id = item->id;
      b.p_mc = found[0]->probs;
      for (std::size_t k = 1; k < found.size(); ++k) b.p_yn.push_back(found[k]->probs[0]);
      b.gt_index = item->gt_index;
      result.mc.push_back(std::move(b));
    }
  } else {
    const auto& units = std::get<std::vector<NbUnit>>(manifest);
    std::vector<const NbUnit*> sorted;
    for (const auto& unit : units) sorted.push_back(&unit);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const NbUnit* unit : sorted) {
      // derive_nb_suite order: yn(1,1), yn(1,2), yn(2,1), yn(2,2), a, b, c, d.
      if (!gather(unit->id, derive_nb_suite(*unit), found)) continue;
      NbProbBundle b;
      b.sample_id = unit->id;
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) b.p_yn[i][j] = found[2 * i + j]->probs[0];
      }
      for (std::size_t s = 0; s < 4; ++s) {
        const auto& options = found[4 + s]->probs;
        b.p_mc[s] = nb_mc_from_options(static_cast<char>('a' + s), {options[0], options[1]});
      }
      b.gt_pairing = unit->gt_pairing;
      result.nb.push_back(std::move(b));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kSummaryColumns = {
    "model",           "dataset",         "n_samples",       "acc",
    "j_acc",           "f1",              "lcm",             "lcm_gt",
    "ratio_lcm_gt",    "abstention_rate", "confidence_rate", "overconfidence_rate",
    "n_r",             "n_rgt",           "reliable_precision"};

const std::vector<std::string> kSummaryHeadings = {
    "Model", "Dataset", "N",    "Acc",  "J-Acc", "F1",    "LCM",  "LCM_gt",
    "Ratio", "Abst",    "Conf", "Over", "N_R",   "N_Rgt", "Prec"};

std::string fixed4(double v) { return fmt::format("{:.4f}", v); }

std::string fixed4(const std::optional<double>& v, std::string_view absent) {
  return v ? fixed4(*v) : std::string(absent);
}

std::vector<std::string> summary_cells(const DatasetSummary& s, std::string_view absent) {
  return {s.model,
          s.dataset,
          std::to_string(s.n_samples),
          fixed4(s.acc, absent),
          fixed4(s.j_acc, absent),
          fixed4(s.f1, absent),
          fixed4(s.lcm),
          fixed4(s.lcm_gt, absent),
          fixed4(s.ratio_lcm_gt, absent),
          fixed4(s.abstention_rate, absent),
          fixed4(s.confidence_rate, absent),
          fixed4(s.overconfidence_rate, absent),
          std::to_string(s.n_r),
          s.n_rgt ? std::to_string(*s.n_rgt) : std::string(absent),
          fixed4(s.reliable_precision, absent)};
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_escape(cells[i]);
  }
  out << '\n';
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  cells.push_back(std::move(cell));
  return cells;
}

std::optional<double> parse_optional_real(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("'{}' is not a number", cell), line);
  }
}

std::size_t parse_count(const std::string& cell, std::size_t line) {
  auto v = parse_optional_real(cell, line);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
    throw ParseError(fmt::format("'{}' is not a count", cell), line);
  }
  return static_cast<std::size_t>(*v);
}

void write_aligned(std::ostream& out, const std::vector<std::string>& headings,
                   const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(headings.size());
  for (std::size_t c = 0; c < headings.size(); ++c) width[c] = headings[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) line += "  ";
      // Text columns left-aligned, numeric ones right-aligned.
      line += c < 2 ? fmt::format("{:<{}}", cells[c], width[c])
                    : fmt::format("{:>{}}", cells[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit(headings);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) emit(row);
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const DatasetSummary> summaries) {
  write_csv_row(out, kSummaryColumns);
  for (const auto& s : summaries) write_csv_row(out, summary_cells(s, ""));
}

void write_summary_table(std::ostream& out, std::span<const DatasetSummary> summaries) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : summaries) rows.push_back(summary_cells(s, "-"));
  write_aligned(out, kSummaryHeadings, rows);
}

void write_summary(const fs::path& path, std::span<const DatasetSummary> summaries) {
  {
    auto out = open_out(path);
    write_summary_csv(out, summaries);
    finish(out, path);
  }
  fs::path table = path;
  table.replace_extension(".txt");
  if (table == path) table += ".txt";
  auto out = open_out(table);
  write_summary_table(out, summaries);
  finish(out, table);
}

std::vector<DatasetSummary> read_summary_csv(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  std::map<std::string, std::size_t> column;
  std::vector<DatasetSummary> out;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv(line, number);
    if (column.empty()) {
      for (std::size_t i = 0; i < cells.size(); ++i) column[cells[i]] = i;
      for (const auto& name : {"model", "dataset", "lcm"}) {
        if (!column.count(name)) throw ParseError(fmt::format("missing column '{}'", name), number);
      }
      continue;
    }
    auto cell = [&](const std::string& name) -> std::string {
      auto it = column.find(name);
      if (it == column.end() || it->second >= cells.size()) return {};
      return cells[it->second];
    };
    DatasetSummary s;
    s.model = cell("model");
    s.dataset = cell("dataset");
    if (!cell("n_samples").empty()) s.n_samples = parse_count(cell("n_samples"), number);
    s.acc = parse_optional_real(cell("acc"), number);
    s.j_acc = parse_optional_real(cell("j_acc"), number);
    s.f1 = parse_optional_real(cell("f1"), number);
    auto lcm = parse_optional_real(cell("lcm"), number);
    if (!lcm) throw ParseError("empty 'lcm'", number);
    s.lcm = *lcm;
    s.lcm_gt = parse_optional_real(cell("lcm_gt"), number);
    s.ratio_lcm_gt = parse_optional_real(cell("ratio_lcm_gt"), number);
    s.abstention_rate = parse_optional_real(cell("abstention_rate"), number);
    s.confidence_rate = parse_optional_real(cell("confidence_rate"), number);
    s.overconfidence_rate = parse_optional_real(cell("overconfidence_rate"), number);
    if (!cell("n_r").empty()) s.n_r = parse_count(cell("n_r"), number);
    if (!cell("n_rgt").empty()) s.n_rgt = parse_count(cell("n_rgt"), number);
    s.reliable_precision = parse_optional_real(cell("reliable_precision"), number);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DatasetSummary> load_summaries(const fs::path& path) {
  auto in = open_in(path);
  return read_summary_csv(in);
}

void write_distribution(std::ostream& out, std::span<const DatasetSummary> summaries) {
  std::vector<const DatasetSummary*> sorted;
  for (const auto& s : summaries) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](auto* a, auto* b) { return a->lcm < b->lcm; });
  write_csv_row(out, {"model", "lcm", "abstention_rate", "confidence_rate", "overconfidence_rate"});
  for (const auto* s : sorted) {
    write_csv_row(out, {s->model, fixed4(s->lcm), fixed4(s->abstention_rate, ""),
                        fixed4(s->confidence_rate, ""), fixed4(s->overconfidence_rate, "")});
  }
}

void write_distribution(const fs::path& path, std::span<const DatasetSummary> summaries) {
  auto out = open_out(path);
  write_distribution(out, summaries);
  finish(out, path);
}

void write_correlations(std::ostream& out, std::span<const CorrelationReport> reports) {
  write_csv_row(out, {"dataset", "pair", "pearson_r", "spearman_rho", "kendall_tau", "n_models"});
  for (const auto& r : reports) {
    const std::pair<const char*, const Correlation*> rows[] = {
        {"lcm_acc", &r.lcm_acc}, {"lcm_j_acc", &r.lcm_j_acc}, {"lcm_f1", &r.lcm_f1}};
    for (const auto& [name, c] : rows) {
      write_csv_row(out, {r.dataset, name, fixed4(c->pearson_r, "undefined"),
                          fixed4(c->spearman_rho, "undefined"), fixed4(c->kendall_tau, "undefined"),
                          std::to_string(r.n_models)});
    }
  }
}

void write_correlations(const fs::path& path, std::span<const CorrelationReport> reports) {
  auto out = open_out(path);
  write_correlations(out, reports);
  finish(out, path);
}

}  // namespace vllcm::io
