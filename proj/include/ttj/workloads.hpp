#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ttj/catalog.hpp"
#include "ttj/convolution.hpp"
#include "ttj/query.hpp"

namespace ttj {

enum class Family { example1, box, random_acyclic, star };
std::string to_string(Family f);
Family parse_family(const std::string& s);

struct WorkloadSpec {
  Family family = Family::example1;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  double dangling_fraction = 0.0;
};

struct Workload {
  Query query;
  Database db;
  // Default left-deep order (reverse GYO for acyclic families, the rooted
  // convolution plan for box).
  std::vector<AtomIndex> order;
  std::optional<TreeConvolution> convolution;
};

// R(i,x)={(i,1)}, S(x,y,j)={(1,1,j)}, T(y,k)={(1,k)}, U(y,l)={(0,l)} for
// i,j,k,l in [N]. The result is empty for every N.
Workload gen_example1(std::size_t n);

// R1(x1,x2) R2(x2,x3) R3(x3,x4) R4(x4,x1) S1(x1,y) .. S4(x4,y) with seeded
// values in [1, N], min(N^2, 2N) distinct tuples each, plus the rooted
// convolution (root:(S1 S2 S3 S4) R1 R2 R3 R4).
Workload gen_box(std::size_t n, std::uint64_t seed);

// Random join tree of 1..6 atoms with at most 3 variables each, at most N
// tuples per relation. round(f*N) tuples of every relation with a nonempty
// key schema carry a fresh value on a key variable and so join with nothing;
// the remaining tuples are projections of shared full assignments and all
// contribute to the output.
Workload gen_random_acyclic(const WorkloadSpec& spec);

// Fact F(d1,d2,d3,m) with 4N rows and dimensions Di(di,ai) with N rows.
// A dangling_fraction of fact rows reference a missing key of one dimension,
// drawn from a small pool so failures repeat.
Workload gen_star(const WorkloadSpec& spec);

Workload generate(const WorkloadSpec& spec);

// CSVs plus query.txt, plan.txt and (when present) conv.txt.
void write_workload(const std::filesystem::path& dir, const Workload& w);

}  // namespace ttj
