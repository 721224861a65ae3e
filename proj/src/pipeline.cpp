#include "pipeline.hpp"

#include <algorithm>

#include "ttj/error.hpp"

namespace ttj::detail {

Pipeline::Pipeline(const Plan& plan, const Database& db, OutputSink& sink,
                   ExecStats& stats, ExecObserver* observer, bool lazy_build)
    : plan_(plan),
      sink_(sink),
      stats_(stats),
      observer_(observer),
      lazy_build_(lazy_build) {
  const auto vars = plan.output_vars();
  auto slot_of = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) -
                                    vars.begin());
  };
  binding_.resize(vars.size());

  steps_.resize(plan.size());
  for (PlanPos i = 1; i <= plan.size(); ++i) {
    const PlanStep& ps = plan.step(i);
    Step& s = step(i);
    s.atom = &ps.atom;
    s.rel = &db.get(ps.atom.relation);
    if (s.rel->schema().size() != ps.atom.vars.size()) {
      throw ExecError("atom " + ps.atom.alias + " has " +
                      std::to_string(ps.atom.vars.size()) +
                      " variables but relation " + s.rel->name() + " has " +
                      std::to_string(s.rel->schema().size()) + " columns");
    }
    auto column_of = [&](const std::string& v) {
      return static_cast<std::size_t>(
          std::find(ps.atom.vars.begin(), ps.atom.vars.end(), v) -
          ps.atom.vars.begin());
    };
    std::vector<std::string> key_cols;
    for (const auto& k : ps.keys) {
      key_cols.push_back(s.rel->schema()[column_of(k)]);
      s.key_slots.push_back(slot_of(k));
    }
    s.key_attrs = Schema(std::move(key_cols));
    for (std::size_t c = 0; c < ps.atom.vars.size(); ++c) {
      const auto& v = ps.atom.vars[c];
      if (std::find(ps.keys.begin(), ps.keys.end(), v) == ps.keys.end()) {
        s.writes.emplace_back(c, slot_of(v));
      }
    }
    s.parent = ps.parent_pos;
    s.cyclic_parent = ps.cyclic_parent;
    if (s.parent == PlanPos{1} && !s.cyclic_parent) {
      const Atom& root = plan.step(1).atom;
      for (const auto& k : ps.keys) {
        s.root_key_columns.push_back(static_cast<std::size_t>(
            std::find(root.vars.begin(), root.vars.end(), k) - root.vars.begin()));
      }
    }
    s.key.reserve(ps.keys.size());
    stats_.input_count += s.rel->size();
  }
  if (!lazy_build_) {
    for (auto& s : steps_) {
      s.index.emplace(*s.rel, s.key_attrs);
      stats_.build_scans += s.index->build_scans();
    }
  }
}

HashIndex::Bucket* Pipeline::probe(PlanPos i) {
  Step& s = step(i);
  if (!s.index) {
    s.index.emplace(*s.rel, s.key_attrs);
    stats_.build_scans += s.index->build_scans();
  }
  s.key.clear();
  for (auto slot : s.key_slots) s.key.push_back(binding_[slot]);
  auto* bucket = s.index->probe(s.key);
  ++stats_.probes;
  if (!bucket && i > 1) ++stats_.probe_failures;
  if (observer_) observer_->on_probe(i, bucket != nullptr);
  return bucket;
}

void Pipeline::bind(const Step& s, const Tuple& t) {
  for (const auto& [col, slot] : s.writes) binding_[slot] = t.values[col];
}

void Pipeline::emit() {
  ++stats_.output_count;
  sink_.consume(binding_);
}

void Pipeline::run_hash_join() {
  sink_.begin(plan_.output_vars());
  if (!steps_.empty()) hash_join(1);
  sink_.end();
}

void Pipeline::hash_join(PlanPos i) {
  ++stats_.step_entries;
  if (i > steps_.size()) {
    emit();
    return;
  }
  auto* bucket = probe(i);
  if (!bucket) return;
  const Step& s = step(i);
  for (auto slot = bucket->first(); slot != HashIndex::Bucket::kEnd;
       slot = bucket->next(slot)) {
    bind(s, bucket->at(slot));
    hash_join(i + 1);
  }
}

void Pipeline::run_tree_tracker(TtjOptions opts) {
  opts_ = opts;
  sink_.begin(plan_.output_vars());
  if (!steps_.empty()) tree_tracker(1);
  sink_.end();
}

bool Pipeline::matches_no_good(const Tuple& root_tuple) {
  for (const auto& [child, list] : no_goods_.entries()) {
    scratch_.clear();
    for (auto c : step(child).root_key_columns) {
      scratch_.push_back(root_tuple.values[c]);
    }
    if (list.contains(scratch_)) return true;
  }
  return false;
}

Pipeline::Backjump Pipeline::tree_tracker(PlanPos i) {
  ++stats_.step_entries;
  if (i > steps_.size()) {
    emit();
    return {};
  }
  Step& s = step(i);
  auto* bucket = probe(i);
  if (!bucket) {
    if (!s.parent) return {};
    ++stats_.backjumps;
    if (observer_) observer_->on_backjump(i, *s.parent, s.cyclic_parent);
    return {*s.parent, i, s.cyclic_parent};
  }

  for (auto slot = bucket->first(); slot != HashIndex::Bucket::kEnd;
       slot = bucket->next(slot)) {
    const Tuple& r = bucket->at(slot);
    if (i == 1 && opts_.no_good && matches_no_good(r)) {
      ++stats_.nogood_hits;
      continue;
    }
    bind(s, r);
    const Backjump result = tree_tracker(i + 1);
    if (result.target == 0) continue;
    if (result.target != i) return result;

    // Caught. The root never deletes (it is not iterated again); with ng it
    // remembers the failed key instead. Nested-segment parents never delete.
    bool deleted = false;
    if (result.cyclic) {
      // keep r
    } else if (i == 1) {
      if (opts_.no_good && no_goods_.add(result.origin, step(result.origin).key)) {
        ++stats_.nogood_adds;
      }
    } else {
      s.index->erase(*bucket, slot);
      ++stats_.deletions;
      deleted = true;
      if (observer_) observer_->on_delete(i, *s.atom, r);
    }
    if (observer_) observer_->on_catch(i, result.origin, deleted);

    if (deleted && opts_.deletion_propagation && bucket->empty() && s.parent) {
      ++stats_.dp_propagations;
      ++stats_.backjumps;
      if (observer_) observer_->on_backjump(i, *s.parent, s.cyclic_parent);
      return {*s.parent, i, s.cyclic_parent};
    }
  }
  return {};
}

}  // namespace ttj::detail
