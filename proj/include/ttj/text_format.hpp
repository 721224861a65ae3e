#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ttj/convolution.hpp"
#include "ttj/planner.hpp"
#include "ttj/query.hpp"

namespace ttj {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// One atom per line: `Alias=RelName(v1,v2,...)` or `RelName(v1,...)`.
// Blank lines and lines starting with '#' are ignored.
Query parse_query(std::string_view text);
std::string format_query(const Query& q);

// Atom aliases separated by whitespace (one per line in files).
std::vector<std::string> parse_plan(std::string_view text);

// Nested binary groups, e.g. `((A B) (C D))`.
BushyPlan parse_bushy(std::string_view text);

// Nested groups with an optional `root:` marker on nested groups, e.g.
// `(root:(S1 S2 S3 S4) R1 R2 R3 R4)`.
TreeConvolution parse_convolution(std::string_view text);

}  // namespace ttj
