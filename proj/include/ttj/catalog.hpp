#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ttj {

// A scalar in a tuple: 64-bit integer or text.
using Value = std::variant<std::int64_t, std::string>;

// An ordered list of values: a tuple body, a hash key, or an output row.
using Row = std::vector<Value>;

std::string to_string(const Value& v);
std::string to_string(std::span<const Value> row);

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept;
};

struct RowHash {
  std::size_t operator()(const Row& row) const noexcept;
};

// Ordered list of pairwise distinct attribute names.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<std::string> attrs);
  Schema(std::initializer_list<std::string> attrs);

  const std::vector<std::string>& attrs() const { return attrs_; }
  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }
  const std::string& operator[](std::size_t i) const { return attrs_[i]; }

  std::optional<std::size_t> find(std::string_view attr) const;
  bool contains(std::string_view attr) const { return find(attr).has_value(); }
  // Throws ContractViolation when attr is absent.
  std::size_t index_of(std::string_view attr) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<std::string> attrs_;
};

struct Tuple {
  std::uint64_t row_id = 0;
  Row values;
};

// A named relation. Tuples carry row ids unique within the relation, so
// duplicate value lists (bag semantics) stay distinguishable.
class Relation {
 public:
  Relation() = default;
  Relation(std::string name, Schema schema);

  const std::string& name() const { return name_; }
  const Schema& schema() const { return schema_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  // Appends with the next free row id.
  const Tuple& add(Row values);
  // Appends keeping the caller's row id; it must not collide.
  const Tuple& add(Tuple tuple);
  void reserve(std::size_t n) { tuples_.reserve(n); }

 private:
  std::string name_;
  Schema schema_;
  std::vector<Tuple> tuples_;
  std::uint64_t next_row_id_ = 0;
};

// Relations by name. Relations are immutable once inserted.
class Database {
 public:
  void add(Relation rel);
  bool contains(std::string_view name) const;
  // Throws ExecError when the relation is missing.
  const Relation& get(std::string_view name) const;
  const std::map<std::string, Relation, std::less<>>& relations() const {
    return relations_;
  }

 private:
  std::map<std::string, Relation, std::less<>> relations_;
};

// Parses an integer when the whole field is a decimal literal, else text.
Value parse_value(std::string_view field);

Relation load_csv(const std::filesystem::path& path, const std::string& name,
                  bool dedup);
Relation parse_csv(std::string_view text, const std::string& name, bool dedup);
void write_csv(const std::filesystem::path& path, const Relation& rel);

// Loads every `*.csv` in dir; relation name = file stem.
Database load_database(const std::filesystem::path& dir, bool dedup);
void write_database(const std::filesystem::path& dir, const Database& db);

// Values of `values` (laid out per `schema`) at `attrs`, in `attrs` order.
Row project(std::span<const Value> values, const Schema& schema,
            const Schema& attrs);

struct SchemaRow {
  Schema schema;
  Row values;
};

// Natural concatenation: shared attributes appear once, r's other attributes
// are appended in r's order. Disagreement on a shared attribute is a
// ContractViolation.
SchemaRow concat(const SchemaRow& t, const SchemaRow& r);

// Hash index over a relation with deletable, ordered buckets.
//
// A bucket keeps its entries in relation order on an intrusive linked list.
// Erasing unlinks the entry but leaves its forward link intact, so a cursor
// parked on an erased entry can still advance. An iteration therefore visits
// every entry live at loop start exactly once unless it is erased before the
// cursor reaches it, regardless of which entries are erased meanwhile.
class HashIndex {
 public:
  class Bucket {
   public:
    using Slot = std::int32_t;
    static constexpr Slot kEnd = -1;

    std::size_t live() const { return live_; }
    bool empty() const { return live_ == 0; }
    Slot first() const { return head_; }
    // Next live slot after `s`; `s` may already be erased.
    Slot next(Slot s) const;
    const Tuple& at(Slot s) const { return *entries_[s].tuple; }
    bool is_live(Slot s) const { return entries_[s].live; }

   private:
    friend class HashIndex;
    struct Entry {
      const Tuple* tuple;
      Slot prev;
      Slot next;
      bool live;
    };
    void push(const Tuple* t);
    void erase(Slot s);

    std::vector<Entry> entries_;
    Slot head_ = kEnd;
    Slot tail_ = kEnd;
    std::size_t live_ = 0;
  };

  // key_attrs must be a subset of rel's schema; empty gives the degenerate
  // index with the whole relation under key ().
  HashIndex(const Relation& rel, const Schema& key_attrs);

  const std::string& source() const { return source_; }
  const Schema& key_attrs() const { return key_attrs_; }
  std::span<const std::size_t> key_columns() const { return key_columns_; }

  // Bucket of live tuples under key, or nullptr for a miss. A bucket whose
  // tuples were all erased is reported as a miss. Counts one probe.
  Bucket* probe(const Row& key);

  // Erases the tuple at slot s; the bucket must have come from this index.
  void erase(Bucket& bucket, Bucket::Slot s);
  // Looks up t in the bucket under key and erases it. ContractViolation when
  // t is not live there.
  void delete_tuple(const Row& key, const Tuple& t);

  std::size_t bucket_count() const { return buckets_.size(); }
  std::size_t live_count() const { return live_count_; }
  std::size_t deleted_count() const { return deleted_count_; }
  std::size_t probe_count() const { return probe_count_; }
  std::size_t build_scans() const { return build_scans_; }

  // Every (key, bucket) pair, empty buckets included.
  const std::unordered_map<Row, Bucket, RowHash>& buckets() const {
    return buckets_;
  }

 private:
  std::string source_;
  Schema key_attrs_;
  std::vector<std::size_t> key_columns_;
  std::unordered_map<Row, Bucket, RowHash> buckets_;
  std::size_t live_count_ = 0;
  std::size_t deleted_count_ = 0;
  std::size_t probe_count_ = 0;
  std::size_t build_scans_ = 0;
};

}  // namespace ttj
