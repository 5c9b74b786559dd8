#include "tempdiff/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tempdiff/error.hpp"

namespace tempdiff {

DatasetResult eval_hard(Backend& backend,
                        const std::vector<HardInstance>& dataset,
                        const std::string& name) {
    if (dataset.empty()) throw Error("cannot evaluate an empty dataset");
    DatasetResult out;
    out.name = name;
    size_t correct = 0;
    for (const auto& inst : dataset) {
        Prediction pred = predict_relation(inst.context, inst.pair, backend);
        if (pred.relation == inst.gold) ++correct;
        out.records.push_back({inst.id, to_string(inst.gold),
                               to_string(pred.relation), pred.score_before,
                               pred.score_after});
    }
    out.evaluated = dataset.size();
    out.accuracy = static_cast<double>(correct) / dataset.size();
    return out;
}

DatasetResult eval_today(Backend& backend,
                         const std::vector<DiffInstance>& dataset,
                         bool gold_exp, ShiftRule rule,
                         const std::string& name) {
    if (dataset.empty()) throw Error("cannot evaluate an empty dataset");
    DatasetResult out;
    out.name = name;
    size_t correct = 0;
    for (const auto& inst : dataset) {
        if (gold_exp && !inst.explanation) {
            ++out.skipped;
            continue;
        }
        ShiftPrediction pred = predict_shift(inst, backend, gold_exp, rule);
        if (pred.direction == inst.direction) ++correct;
        out.records.push_back({inst.id, to_string(inst.direction),
                               to_string(pred.direction), pred.delta_before,
                               pred.delta_after});
    }
    out.evaluated = dataset.size() - out.skipped;
    if (out.evaluated == 0) {
        throw Error("no evaluable instances in dataset '" + name + "'");
    }
    out.accuracy = static_cast<double>(correct) / out.evaluated;
    return out;
}

EvalReport build_report(const std::vector<DatasetResult>& results,
                        const std::string& config_echo) {
    if (results.empty()) throw Error("report requires at least one dataset");
    EvalReport report;
    report.config_echo = config_echo;
    for (const auto& r : results) {
        report.accuracies[r.name] = r.accuracy;
        report.records.insert(report.records.end(), r.records.begin(),
                              r.records.end());
    }
    double sum = 0.0;
    int n = 0;
    for (const char* core : {"tracie", "matres", "today"}) {
        auto it = report.accuracies.find(core);
        if (it != report.accuracies.end()) {
            sum += it->second;
            ++n;
        }
    }
    if (n >= 2) {
        report.average = sum / n;
        report.has_average = true;
    }
    return report;
}

std::string format_percent(double fraction) {
    double pct = fraction * 100.0;
    double rounded = std::floor(pct * 10.0 + 0.5) / 10.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", rounded);
    return buf;
}

std::string render_report(const EvalReport& report) {
    struct Column {
        const char* key;
        const char* header;
    };
    static constexpr Column kColumns[] = {
        {"tracie", "TRACIE"},
        {"matres", "MATRES"},
        {"today", "TODAY"},
        {"today_gold_exp", "TODAY (gold exp.)"},
    };

    std::vector<std::pair<std::string, std::string>> cells;
    for (const auto& col : kColumns) {
        auto it = report.accuracies.find(col.key);
        if (it != report.accuracies.end()) {
            cells.emplace_back(col.header, format_percent(it->second));
        }
    }
    // Datasets outside the canonical set print after them, in map order.
    for (const auto& [name, acc] : report.accuracies) {
        bool canonical = false;
        for (const auto& col : kColumns) canonical |= name == col.key;
        if (!canonical) cells.emplace_back(name, format_percent(acc));
    }
    if (report.has_average) {
        cells.emplace_back("Average", format_percent(report.average));
    }

    std::ostringstream out;
    if (!report.config_echo.empty()) out << "# " << report.config_echo << "\n";
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out << "  ";
        out << cells[i].first;
    }
    out << "\n";
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out << "  ";
        // Right-align the value under its header.
        int width = static_cast<int>(cells[i].first.size());
        out << std::string(
                   static_cast<size_t>(std::max(
                       0, width - static_cast<int>(cells[i].second.size()))),
                   ' ')
            << cells[i].second;
    }
    out << "\n";
    return out.str();
}

std::string render_report(const std::vector<DatasetResult>& results) {
    return render_report(build_report(results));
}

}  // namespace tempdiff
