#include "theta_forge/value_catalog.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "theta_forge/errors.hpp"

namespace theta_forge {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    const auto bar = line.find('|', start);
    fields.push_back(trim(line.substr(start, bar == std::string_view::npos ? bar : bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return fields;
}

std::string status_text(const ValueCatalogEntry& e) {
  switch (e.status) {
    case EntryStatus::expected_pass:
      return "expected_pass";
    case EntryStatus::suspect:
      return "suspect";
    case EntryStatus::candidate:
      return "candidate(" + e.candidate_of + ")";
  }
  return "?";
}

}  // namespace

ValueCatalogEntry parse_entry(std::string_view line) {
  const auto fields = split_fields(line);
  if (fields.size() != 5 && fields.size() != 6) {
    throw UsageError("value catalog record needs 5 or 6 '|'-separated fields: " + std::string(line));
  }
  ValueCatalogEntry e;
  e.id = fields[0];
  if (e.id.empty()) throw UsageError("value catalog record with empty id");
  e.spec = ParamSpec::parse(fields[1]);
  try {
    e.expr = parse_expr(fields[2]);
  } catch (const ParseError& err) {
    throw UsageError("entry " + e.id + ": " + err.what());
  }
  e.citation = fields[3];
  const std::string& status = fields[4];
  if (status == "expected_pass") {
    e.status = EntryStatus::expected_pass;
  } else if (status == "suspect") {
    e.status = EntryStatus::suspect;
  } else if (status.rfind("candidate(", 0) == 0 && status.back() == ')') {
    e.status = EntryStatus::candidate;
    e.candidate_of = status.substr(10, status.size() - 11);
    if (e.candidate_of.empty()) throw UsageError("entry " + e.id + ": candidate without parent");
  } else {
    throw UsageError("entry " + e.id + ": unknown status '" + status + "'");
  }
  if (fields.size() == 6) e.note = fields[5];
  if (e.status == EntryStatus::suspect && e.note.empty()) {
    throw UsageError("suspect entry " + e.id + " must carry a note");
  }
  return e;
}

std::string serialize_entry(const ValueCatalogEntry& e) {
  std::string line = e.id + " | " + e.spec.to_string() + " | " + print_expr(e.expr) + " | " + e.citation +
                     " | " + status_text(e);
  if (!e.note.empty()) line += " | " + e.note;
  return line;
}

ValueCatalog ValueCatalog::parse(std::string_view text) {
  ValueCatalog catalog;
  std::map<std::string, size_t, std::less<>> index;
  size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      catalog.lines_.emplace_back(Comment{std::string(line)});
      continue;
    }
    ValueCatalogEntry entry = parse_entry(line);
    if (index.count(entry.id)) throw UsageError("duplicate value catalog id '" + entry.id + "'");
    index.emplace(entry.id, catalog.entries_.size());
    catalog.lines_.emplace_back(EntryRef{catalog.entries_.size()});
    catalog.entries_.push_back(std::move(entry));
  }
  for (const auto& entry : catalog.entries_) {
    if (entry.status != EntryStatus::candidate) continue;
    const auto it = index.find(entry.candidate_of);
    if (it == index.end()) {
      throw UsageError("candidate " + entry.id + " names unknown parent '" + entry.candidate_of + "'");
    }
    auto& parent = catalog.entries_[it->second];
    if (parent.status != EntryStatus::suspect) {
      throw UsageError("candidate " + entry.id + " attached to non-suspect entry " + parent.id);
    }
    parent.candidates.push_back(entry.id);
  }
  return catalog;
}

ValueCatalog ValueCatalog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open value catalog '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ValueCatalog::serialize() const {
  std::string out;
  for (const auto& line : lines_) {
    if (const auto* c = std::get_if<Comment>(&line)) {
      out += c->text;
    } else {
      out += serialize_entry(entries_[std::get<EntryRef>(line).index]);
    }
    out += '\n';
  }
  return out;
}

const ValueCatalogEntry* ValueCatalog::find(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const ValueCatalogEntry& ValueCatalog::at(std::string_view id) const {
  if (const auto* e = find(id)) return *e;
  throw UsageError("no value catalog entry '" + std::string(id) + "'");
}

namespace {

struct Measurement {
  BigReal residual;
  BigReal threshold;
};

Measurement measure(const ValueCatalogEntry& entry, const Precision& prec) {
  const BigReal param = eval_param(entry.spec, prec);
  const BigReal closed = eval_expr(entry.expr, prec);
  BigReal residual = abs(param - closed);
  if (!closed.is_zero()) residual /= abs(closed);
  return {std::move(residual), pass_threshold(prec.digits, kValueSlack, prec.bits())};
}

}  // namespace

VerificationReport verify_value(const ValueCatalogEntry& entry, const Precision& prec) {
  const auto started = std::chrono::steady_clock::now();
  VerificationReport report;
  report.id = entry.id;
  report.kind = ReportKind::value;
  report.digits = prec.digits;
  try {
    Measurement m = measure(entry, prec);
    bool passed = m.residual < m.threshold;
    std::string retry_note;
    if (!passed && entry.status != EntryStatus::suspect) {
      // One retry with doubled guard digits before a failure is reported.
      m = measure(entry, prec.with_guard(2 * prec.guard));
      passed = m.residual < m.threshold;
      retry_note = "; rechecked with guard " + std::to_string(2 * prec.guard);
    }
    report.residual = format_residual(m.residual);
    const std::string threshold = "threshold 1e-" + std::to_string(prec.digits - kValueSlack);
    switch (entry.status) {
      case EntryStatus::suspect: {
        report.status = ReportStatus::suspect;
        report.note = std::string(passed ? "printed form certifies" : "printed form fails") + " (" +
                      threshold + "); " + entry.note;
        if (!entry.candidates.empty()) {
          report.note += "; corrected candidate";
          for (const auto& c : entry.candidates) report.note += " " + c;
        }
        break;
      }
      case EntryStatus::candidate:
        report.status = passed ? ReportStatus::pass : ReportStatus::fail;
        report.note = "corrected candidate for " + entry.candidate_of + "; " + threshold + retry_note;
        if (!entry.note.empty()) report.note += "; " + entry.note;
        break;
      case EntryStatus::expected_pass:
        report.status = passed ? ReportStatus::pass : ReportStatus::fail;
        report.note = threshold + retry_note;
        if (!entry.note.empty()) report.note += "; " + entry.note;
        break;
    }
  } catch (const std::exception& err) {
    report.status = ReportStatus::error;
    report.residual = "nan";
    report.note = err.what();
  }
  report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  return report;
}

}  // namespace theta_forge
