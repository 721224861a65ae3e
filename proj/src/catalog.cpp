#include "ttj/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "ttj/error.hpp"

namespace ttj {

namespace {

std::size_t mix(std::size_t seed, std::size_t h) {
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

std::string to_string(std::span<const Value> row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ",";
    out += to_string(row[i]);
  }
  return out + ")";
}

std::size_t ValueHash::operator()(const Value& v) const noexcept {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    return std::hash<std::int64_t>{}(*i);
  }
  return mix(0x51ed270b, std::hash<std::string>{}(std::get<std::string>(v)));
}

std::size_t RowHash::operator()(const Row& row) const noexcept {
  std::size_t seed = row.size();
  for (const auto& v : row) seed = mix(seed, ValueHash{}(v));
  return seed;
}

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<std::string> attrs) : attrs_(std::move(attrs)) {
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (attrs_[i] == attrs_[j]) {
        throw SchemaError("duplicate attribute '" + attrs_[i] + "'");
      }
    }
  }
}

Schema::Schema(std::initializer_list<std::string> attrs)
    : Schema(std::vector<std::string>(attrs)) {}

std::optional<std::size_t> Schema::find(std::string_view attr) const {
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (attrs_[i] == attr) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view attr) const {
  auto i = find(attr);
  if (!i) {
    throw ContractViolation("attribute '" + std::string(attr) +
                            "' not in schema");
  }
  return *i;
}

// ---------------------------------------------------------------------------
// Relation / Database

Relation::Relation(std::string name, Schema schema)
    : name_(std::move(name)), schema_(std::move(schema)) {}

const Tuple& Relation::add(Row values) {
  return add(Tuple{next_row_id_, std::move(values)});
}

const Tuple& Relation::add(Tuple tuple) {
  if (tuple.values.size() != schema_.size()) {
    throw ContractViolation("tuple arity " +
                            std::to_string(tuple.values.size()) +
                            " does not match schema of " + name_);
  }
  next_row_id_ = std::max(next_row_id_, tuple.row_id + 1);
  tuples_.push_back(std::move(tuple));
  return tuples_.back();
}

void Database::add(Relation rel) {
  auto name = rel.name();
  relations_.insert_or_assign(std::move(name), std::move(rel));
}

bool Database::contains(std::string_view name) const {
  return relations_.find(name) != relations_.end();
}

const Relation& Database::get(std::string_view name) const {
  auto it = relations_.find(name);
  if (it == relations_.end()) {
    throw ExecError("relation '" + std::string(name) + "' not in database");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// CSV

Value parse_value(std::string_view field) {
  std::int64_t v = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (!field.empty() && ec == std::errc{} && ptr == end) return v;
  return std::string(field);
}

Relation parse_csv(std::string_view text, const std::string& name,
                   bool dedup) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty() || lines.front().empty()) {
    throw LoadError(name + ": missing header row");
  }

  std::vector<std::string> header;
  for (auto f : split_fields(lines.front())) header.emplace_back(f);
  Relation rel(name, Schema(std::move(header)));

  std::unordered_set<Row, RowHash> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_fields(lines[i]);
    if (fields.size() != rel.schema().size()) {
      throw LoadError(name + ": line " + std::to_string(i + 1) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(rel.schema().size()));
    }
    Row row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_value(f));
    if (dedup && !seen.insert(row).second) continue;
    rel.add(std::move(row));
  }
  return rel;
}

Relation load_csv(const std::filesystem::path& path, const std::string& name,
                  bool dedup) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), name, dedup);
}

void write_csv(const std::filesystem::path& path, const Relation& rel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto& attrs = rel.schema().attrs();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    out << (i ? "," : "") << attrs[i];
  }
  out << '\n';
  for (const auto& t : rel.tuples()) {
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      out << (i ? "," : "") << to_string(t.values[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Database load_database(const std::filesystem::path& dir, bool dedup) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  Database db;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    db.add(load_csv(entry.path(), entry.path().stem().string(), dedup));
  }
  return db;
}

void write_database(const std::filesystem::path& dir, const Database& db) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, rel] : db.relations()) {
    write_csv(dir / (name + ".csv"), rel);
  }
}

// ---------------------------------------------------------------------------
// Tuple operations

Row project(std::span<const Value> values, const Schema& schema,
            const Schema& attrs) {
  Row out;
  out.reserve(attrs.size());
  for (const auto& a : attrs.attrs()) out.push_back(values[schema.index_of(a)]);
  return out;
}

SchemaRow concat(const SchemaRow& t, const SchemaRow& r) {
  SchemaRow out{t.schema, t.values};
  std::vector<std::string> attrs = t.schema.attrs();
  for (std::size_t i = 0; i < r.schema.size(); ++i) {
    if (auto j = t.schema.find(r.schema[i])) {
      if (t.values[*j] != r.values[i]) {
        throw ContractViolation("concat: tuples disagree on '" +
                                r.schema[i] + "'");
      }
      continue;
    }
    attrs.push_back(r.schema[i]);
    out.values.push_back(r.values[i]);
  }
  out.schema = Schema(std::move(attrs));
  return out;
}

// ---------------------------------------------------------------------------
// HashIndex

HashIndex::Bucket::Slot HashIndex::Bucket::next(Slot s) const {
  Slot n = entries_[s].next;
  while (n != kEnd && !entries_[n].live) n = entries_[n].next;
  return n;
}

void HashIndex::Bucket::push(const Tuple* t) {
  auto s = static_cast<Slot>(entries_.size());
  entries_.push_back(Entry{t, tail_, kEnd, true});
  if (tail_ == kEnd) {
    head_ = s;
  } else {
    entries_[tail_].next = s;
  }
  tail_ = s;
  ++live_;
}

void HashIndex::Bucket::erase(Slot s) {
  auto& e = entries_[s];
  if (e.prev == kEnd) {
    head_ = e.next;
  } else {
    entries_[e.prev].next = e.next;
  }
  if (e.next == kEnd) {
    tail_ = e.prev;
  } else {
    entries_[e.next].prev = e.prev;
  }
  // e.next is kept so a cursor parked on s can still advance.
  e.live = false;
  --live_;
}

HashIndex::HashIndex(const Relation& rel, const Schema& key_attrs)
    : source_(rel.name()), key_attrs_(key_attrs) {
  key_columns_.reserve(key_attrs.size());
  for (const auto& a : key_attrs.attrs()) {
    key_columns_.push_back(rel.schema().index_of(a));
  }
  Row key;
  for (const auto& t : rel.tuples()) {
    key.clear();
    for (auto c : key_columns_) key.push_back(t.values[c]);
    buckets_[key].push(&t);
    ++build_scans_;
  }
  live_count_ = rel.size();
}

HashIndex::Bucket* HashIndex::probe(const Row& key) {
  ++probe_count_;
  auto it = buckets_.find(key);
  if (it == buckets_.end() || it->second.empty()) return nullptr;
  return &it->second;
}

void HashIndex::erase(Bucket& bucket, Bucket::Slot s) {
  if (!bucket.is_live(s)) {
    throw ContractViolation("erase of a tuple that is already deleted");
  }
  bucket.erase(s);
  --live_count_;
  ++deleted_count_;
}

void HashIndex::delete_tuple(const Row& key, const Tuple& t) {
  auto it = buckets_.find(key);
  if (it != buckets_.end()) {
    auto& b = it->second;
    for (auto s = b.first(); s != Bucket::kEnd; s = b.next(s)) {
      if (b.at(s).row_id == t.row_id) {
        erase(b, s);
        return;
      }
    }
  }
  throw ContractViolation("delete_tuple: row " + std::to_string(t.row_id) +
                          " not live under key " + to_string(key));
}

}  // namespace ttj
