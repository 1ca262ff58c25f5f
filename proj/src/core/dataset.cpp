#include "dimscope/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dimscope/error.hpp"
#include "fnv.hpp"

namespace dimscope {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parseReal(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || end != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool isBlank(std::string_view cell) { return trim(cell).empty(); }

// RFC-4180 records; row numbers are 1-based and count the header.
std::vector<std::vector<std::string>> splitRecords(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool inQuotes = false;
  bool fieldWasQuoted = false;
  std::size_t line = 1;

  auto endField = [&] {
    row.push_back(std::move(field));
    field.clear();
    fieldWasQuoted = false;
  };
  auto endRow = [&] {
    endField();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (inQuotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          inQuotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || fieldWasQuoted) {
          throw ParseError(line, row.size() + 1, "unexpected quote inside unquoted field");
        }
        inQuotes = true;
        fieldWasQuoted = true;
        break;
      case ',':
        endField();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        endRow();
        ++line;
        break;
      case '\n':
        endRow();
        ++line;
        break;
      default:
        if (fieldWasQuoted) {
          throw ParseError(line, row.size() + 1, "characters after closing quote");
        }
        field.push_back(c);
    }
  }
  if (inQuotes) throw ParseError(line, row.size() + 1, "unterminated quoted field");
  if (!field.empty() || fieldWasQuoted || !row.empty()) endRow();
  return rows;
}

void appendCsvField(std::string& out, std::string_view value) {
  const bool quote = value.find_first_of(",\"\r\n") != std::string_view::npos ||
                     (!value.empty() && (value.front() == ' ' || value.front() == '\t' ||
                                         value.back() == ' ' || value.back() == '\t'));
  if (!quote) {
    out.append(value);
    return;
  }
  out.push_back('"');
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void appendReal(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace

Dataset::Dataset(std::string name, std::vector<NumericColumn> numeric,
                 std::vector<CategoricalColumn> categorical)
    : name_(std::move(name)) {
  if (numeric.size() < 2) {
    throw Error(ErrorCode::Schema, "dataset needs at least 2 numeric columns, got " +
                                       std::to_string(numeric.size()));
  }
  itemCount_ = numeric.front().values.size();
  if (itemCount_ == 0) throw Error(ErrorCode::InvalidArgument, "dataset has no items");

  Fnv1a hash;
  hash.add(static_cast<std::uint64_t>(numeric.size()));
  hash.add(static_cast<std::uint64_t>(categorical.size()));
  hash.add(static_cast<std::uint64_t>(itemCount_));

  for (std::size_t j = 0; j < numeric.size(); ++j) {
    auto& column = numeric[j];
    if (column.values.size() != itemCount_) {
      throw Error(ErrorCode::InvalidArgument, "numeric column '" + column.label +
                                                  "' has " +
                                                  std::to_string(column.values.size()) +
                                                  " values, expected " +
                                                  std::to_string(itemCount_));
    }
    NumericDimMeta meta;
    meta.id = j;
    meta.label = column.label;
    bool any = false;
    for (double& v : column.values) {
      if (!std::isfinite(v)) v = kMissing;
      if (isMissing(v)) {
        ++meta.missingCount;
        continue;
      }
      if (!any) {
        meta.vmin = meta.vmax = v;
        any = true;
      } else {
        meta.vmin = std::min(meta.vmin, v);
        meta.vmax = std::max(meta.vmax, v);
      }
    }
    hash.add(meta.label);
    for (double v : column.values) {
      hash.add(isMissing(v) ? std::uint64_t{0x7ff8000000000000ULL} : std::bit_cast<std::uint64_t>(v));
    }
    numericMeta_.push_back(std::move(meta));
    numeric_.push_back(std::move(column.values));
  }

  for (std::size_t k = 0; k < categorical.size(); ++k) {
    const auto& column = categorical[k];
    if (column.values.size() != itemCount_) {
      throw Error(ErrorCode::InvalidArgument, "categorical column '" + column.label +
                                                  "' has wrong length");
    }
    CategoricalDimMeta meta;
    meta.id = k;
    meta.label = column.label;
    for (const auto& cell : column.values) {
      if (cell) meta.values.push_back(*cell);
    }
    std::sort(meta.values.begin(), meta.values.end());
    meta.values.erase(std::unique(meta.values.begin(), meta.values.end()), meta.values.end());
    meta.counts.assign(meta.values.size(), 0);

    std::vector<std::int32_t> codes(itemCount_, kMissingCategory);
    hash.add(meta.label);
    for (std::size_t i = 0; i < itemCount_; ++i) {
      const auto& cell = column.values[i];
      if (!cell) {
        ++meta.missingCount;
        hash.add(std::uint64_t{0xffffffffffffffffULL});
        continue;
      }
      auto it = std::lower_bound(meta.values.begin(), meta.values.end(), *cell);
      const auto code = static_cast<std::int32_t>(it - meta.values.begin());
      codes[i] = code;
      ++meta.counts[code];
      hash.add(*cell);
    }
    categoricalMeta_.push_back(std::move(meta));
    categorical_.push_back(std::move(codes));
  }
  fingerprint_ = hash.value();
}

std::optional<std::size_t> Dataset::findNumeric(std::string_view label) const {
  for (const auto& meta : numericMeta_) {
    if (meta.label == label) return meta.id;
  }
  return std::nullopt;
}

std::optional<std::size_t> Dataset::findCategorical(std::string_view label) const {
  for (const auto& meta : categoricalMeta_) {
    if (meta.label == label) return meta.id;
  }
  return std::nullopt;
}

Dataset parseCsv(std::string_view text, const Schema& schema, std::string name) {
  auto rows = splitRecords(text);
  if (rows.empty()) throw ParseError(1, 1, "missing header row");
  const auto& header = rows.front();
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw ParseError(r + 1, std::min(rows[r].size(), width) + 1,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(rows[r].size()));
    }
  }
  for (const auto& [label, type] : schema) {
    if (std::find(header.begin(), header.end(), label) == header.end()) {
      throw Error(ErrorCode::Schema, "schema names unknown column '" + label + "'");
    }
  }

  std::vector<NumericColumn> numeric;
  std::vector<CategoricalColumn> categorical;
  const std::size_t items = rows.size() - 1;

  for (std::size_t c = 0; c < width; ++c) {
    const std::string& label = header[c];
    ColumnType type = ColumnType::Numeric;
    if (auto it = schema.find(label); it != schema.end()) {
      type = it->second;
    } else {
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        if (!isBlank(cell) && !parseReal(cell)) {
          type = ColumnType::Categorical;
          break;
        }
      }
    }

    if (type == ColumnType::Numeric) {
      NumericColumn column{label, {}};
      column.values.reserve(items);
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        if (isBlank(cell)) {
          column.values.push_back(kMissing);
        } else if (auto v = parseReal(cell)) {
          column.values.push_back(*v);
        } else {
          throw ParseError(r + 1, c + 1, "'" + cell + "' is not a number");
        }
      }
      numeric.push_back(std::move(column));
    } else {
      CategoricalColumn column{label, {}};
      column.values.reserve(items);
      for (std::size_t r = 1; r < rows.size(); ++r) {
        auto& cell = rows[r][c];
        if (cell.empty()) {
          column.values.emplace_back(std::nullopt);
        } else {
          column.values.emplace_back(std::move(cell));
        }
      }
      categorical.push_back(std::move(column));
    }
  }
  return Dataset(std::move(name), std::move(numeric), std::move(categorical));
}

Dataset loadCsv(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseCsv(buffer.str(), schema, path);
}

std::string writeCsv(const Dataset& dataset) {
  std::string out;
  bool first = true;
  auto sep = [&] {
    if (!first) out.push_back(',');
    first = false;
  };
  for (const auto& meta : dataset.numericDims()) {
    sep();
    appendCsvField(out, meta.label);
  }
  for (const auto& meta : dataset.categoricalDims()) {
    sep();
    appendCsvField(out, meta.label);
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < dataset.itemCount(); ++i) {
    first = true;
    for (std::size_t j = 0; j < dataset.numericCount(); ++j) {
      sep();
      const double v = dataset.numeric(j)[i];
      if (!isMissing(v)) appendReal(out, v);
    }
    for (std::size_t k = 0; k < dataset.categoricalCount(); ++k) {
      sep();
      const auto code = dataset.categorical(k)[i];
      if (code != kMissingCategory) {
        appendCsvField(out, dataset.categoricalMeta(k).values[code]);
      }
    }
    out.push_back('\n');
  }
  return out;
}

Schema parseSchema(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Schema, "schema must be a JSON object");
  Schema schema;
  for (const auto& [column, type] : doc.items()) {
    if (type == "numeric") {
      schema[column] = ColumnType::Numeric;
    } else if (type == "categorical") {
      schema[column] = ColumnType::Categorical;
    } else {
      throw Error(ErrorCode::Schema, "column '" + column + "': type must be numeric or categorical");
    }
  }
  return schema;
}

Schema loadSchema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open schema '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseSchema(buffer.str());
}

std::string writeSchema(const Dataset& dataset) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& meta : dataset.numericDims()) doc[meta.label] = "numeric";
  for (const auto& meta : dataset.categoricalDims()) doc[meta.label] = "categorical";
  return doc.dump();
}

double normalizeValue(const NumericDimMeta& dim, double v) noexcept {
  if (isMissing(v)) return v;
  if (dim.isConstant()) return 0.5;
  const double t = (v - dim.vmin) / (dim.vmax - dim.vmin);
  return std::clamp(t, 0.0, 1.0);
}

void BinningSpec::validate() const {
  if (binCount < kMinBins || binCount > kMaxBins) {
    throw Error(ErrorCode::InvalidArgument, "bin count must be in [" +
                                                std::to_string(kMinBins) + ", " +
                                                std::to_string(kMaxBins) + "], got " +
                                                std::to_string(binCount));
  }
}

int binIndex(const NumericDimMeta& dim, const BinningSpec& spec, double v) noexcept {
  const int bin = static_cast<int>(std::floor(spec.binCount * normalizeValue(dim, v)));
  return std::clamp(bin, 0, spec.binCount - 1);
}

}  // namespace dimscope
