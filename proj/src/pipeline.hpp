#pragma once

// Shared left-deep pipeline used by the hash join, TreeTracker and
// Yannakakis executors.

#include <optional>
#include <vector>

#include "ttj/catalog.hpp"
#include "ttj/exec.hpp"
#include "ttj/planner.hpp"

namespace ttj::detail {

class Pipeline {
 public:
  // With lazy_build, a step's index is built on its first probe.
  Pipeline(const Plan& plan, const Database& db, OutputSink& sink,
           ExecStats& stats, ExecObserver* observer, bool lazy_build);

  void run_hash_join();
  void run_tree_tracker(TtjOptions opts);

 private:
  struct Step {
    const Atom* atom = nullptr;
    const Relation* rel = nullptr;
    Schema key_attrs;                 // relation columns holding the keys
    std::vector<std::size_t> key_slots;  // binding slots of the key vars
    std::vector<std::pair<std::size_t, std::size_t>> writes;  // column -> slot
    std::optional<PlanPos> parent;
    bool cyclic_parent = false;
    // Root columns of the keys, when the parent is the root (no-good checks).
    std::vector<std::size_t> root_key_columns;
    std::optional<HashIndex> index;
    Row key;
  };

  // Target 0 means no backjump is in flight.
  struct Backjump {
    PlanPos target = 0;
    PlanPos origin = 0;
    bool cyclic = false;
  };

  Step& step(PlanPos i) { return steps_[i - 1]; }
  HashIndex::Bucket* probe(PlanPos i);
  void bind(const Step& s, const Tuple& t);
  void emit();

  void hash_join(PlanPos i);
  Backjump tree_tracker(PlanPos i);
  bool matches_no_good(const Tuple& root_tuple);

  const Plan& plan_;
  OutputSink& sink_;
  ExecStats& stats_;
  ExecObserver* observer_;
  bool lazy_build_;
  std::vector<Step> steps_;
  Row binding_;
  TtjOptions opts_;
  NoGoodStore no_goods_;
  Row scratch_;
};

}  // namespace ttj::detail
