#pragma once

#include <map>
#include <string>
#include <vector>

#include "tempdiff/instance.hpp"
#include "tempdiff/predictor.hpp"
#include "tempdiff/scorer.hpp"

namespace tempdiff {

struct InstanceRecord {
    std::string id;
    std::string gold;
    std::string predicted;
    double score_a = 0.0;  // before score or delta
    double score_b = 0.0;  // after score or delta
};

struct DatasetResult {
    std::string name;
    double accuracy = 0.0;
    size_t evaluated = 0;
    size_t skipped = 0;  // gold-exp evaluation with missing explanations
    std::vector<InstanceRecord> records;
};

struct EvalReport {
    std::map<std::string, double> accuracies;  // dataset name -> fraction
    double average = 0.0;
    bool has_average = false;
    std::string config_echo;
    std::vector<InstanceRecord> records;
};

// Binary accuracy of the probability vote against hard gold labels.
DatasetResult eval_hard(Backend& backend,
                        const std::vector<HardInstance>& dataset,
                        const std::string& name);

// Shift-direction accuracy on relative-label data. gold_exp appends the
// annotated explanation to every premise; instances lacking one are
// skipped and counted.
DatasetResult eval_today(Backend& backend,
                         const std::vector<DiffInstance>& dataset,
                         bool gold_exp, ShiftRule rule = ShiftRule::delta,
                         const std::string& name = "today");

// Average covers the core benchmarks (tracie, matres, today); the gold-exp
// column reports separately.
EvalReport build_report(const std::vector<DatasetResult>& results,
                        const std::string& config_echo = "");

// Fixed column order (TRACIE, MATRES, TODAY, TODAY gold-exp, Average),
// one-decimal percentages, half-up rounding.
std::string render_report(const EvalReport& report);
std::string render_report(const std::vector<DatasetResult>& results);

// One-decimal percentage with half-up rounding, e.g. 0.7346 -> "73.5".
std::string format_percent(double fraction);

}  // namespace tempdiff
