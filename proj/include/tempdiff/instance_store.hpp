#pragma once

#include <string>
#include <vector>

#include "tempdiff/instance.hpp"

namespace tempdiff {

// Record format: one JSON object per line, UTF-8, fixed field order on write.
// Hard records: id, context, e1, e2, gold, source.
// Diff records: id, context, e1, e2, additional_sentence, direction,
//               explanation (optional), split.

std::vector<HardInstance> load_hard_dataset(const std::string& path,
                                            Split split = Split::train);
std::vector<DiffInstance> load_diff_dataset(const std::string& path);

HardInstance parse_hard_record(const std::string& line, Split split = Split::train);
DiffInstance parse_diff_record(const std::string& line);

// Canonical one-line rendering (fixed field order, compact separators).
std::string serialize(const HardInstance& inst);
std::string serialize(const DiffInstance& inst);

void save_hard_dataset(const std::string& path,
                       const std::vector<HardInstance>& instances);
void save_diff_dataset(const std::string& path,
                       const std::vector<DiffInstance>& instances);

}  // namespace tempdiff
