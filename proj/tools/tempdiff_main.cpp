#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempdiff/config.hpp"
#include "tempdiff/distiller.hpp"
#include "tempdiff/entailment.hpp"
#include "tempdiff/eval.hpp"
#include "tempdiff/instance_store.hpp"
#include "tempdiff/predictor.hpp"
#include "tempdiff/trainer.hpp"
#include "tempdiff/verifier.hpp"

namespace fs = std::filesystem;
using namespace tempdiff;

namespace {

bool looks_like_diff_file(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto rec = nlohmann::json::parse(line, nullptr, false);
        return !rec.is_discarded() && rec.contains("additional_sentence");
    }
    return false;
}

void print_stats(const CorpusStats& stats) {
    std::cout << "split      count\n";
    std::cout << "train      " << stats.n_train << "\n";
    std::cout << "test       " << stats.n_test << "\n";
    std::cout << "total      " << stats.total() << "\n";
    std::cout << "label      count\n";
    for (const auto& [rel, count] : stats.label_counts) {
        std::cout << to_string(rel) << std::string(11 - std::string(to_string(rel)).size(), ' ')
                  << count << "\n";
    }
}

ShiftRule parse_shift_rule(const std::string& name) {
    if (name == "delta") return ShiftRule::delta;
    if (name == "argmax-flip") return ShiftRule::argmax_flip;
    throw Error("unknown shift rule: '" + name + "'");
}

std::unique_ptr<CompletionClient> make_client(const ConfigFile& config,
                                              bool mock_client,
                                              const GenerationPolicy& policy) {
    if (mock_client) {
        return std::make_unique<MockCompletionClient>(canned_completion_handler());
    }
    return std::make_unique<HttpCompletionClient>(llm_config_from(config), policy);
}

std::vector<std::string> read_context_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open contexts file: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

int run_stats(const std::string& path, const std::string& test_path) {
    if (looks_like_diff_file(path)) {
        auto instances = load_diff_dataset(path);
        if (!test_path.empty()) {
            auto test = load_diff_dataset(test_path);
            instances.insert(instances.end(), test.begin(), test.end());
        }
        print_stats(corpus_stats(instances));
    } else {
        auto instances = load_hard_dataset(path, Split::train);
        if (!test_path.empty()) {
            auto test = load_hard_dataset(test_path, Split::test);
            instances.insert(instances.end(), test.begin(), test.end());
        }
        print_stats(corpus_stats(instances));
    }
    return 0;
}

int run_encode(const std::string& input, bool dump, bool gold_exp) {
    nlohmann::ordered_json unused;
    (void)unused;
    auto emit = [&](const EntailmentExample& ex) {
        if (!dump) return;
        nlohmann::ordered_json rec;
        rec["premise"] = ex.premise;
        rec["hypothesis"] = ex.hypothesis;
        if (ex.target) rec["target"] = render_target(*ex.target);
        rec["instance_id"] = ex.meta.instance_id;
        rec["hypothesis_relation"] = to_string(ex.meta.hypothesis_relation);
        rec["with_additional"] = ex.meta.with_additional;
        std::cout << rec.dump() << "\n";
    };
    size_t count = 0;
    if (looks_like_diff_file(input)) {
        for (const auto& inst : load_diff_dataset(input)) {
            for (const auto& ex : encode_relative(inst, gold_exp)) {
                emit(ex);
                ++count;
            }
        }
    } else {
        for (const auto& inst : load_hard_dataset(input)) {
            for (const auto& ex : encode_hard(inst)) {
                emit(ex);
                ++count;
            }
        }
    }
    if (!dump) std::cout << "encoded " << count << " examples\n";
    return 0;
}

int run_train(const std::vector<std::string>& hard_paths,
              const std::vector<std::string>& diff_paths,
              const std::string& config_path, const std::string& out_dir) {
    ConfigFile config =
        config_path.empty() ? ConfigFile::parse("") : ConfigFile::load(config_path);
    TrainConfig train_cfg = train_config_from(config);

    std::vector<HardInstance> hard;
    for (const auto& path : hard_paths) {
        auto loaded = load_hard_dataset(path, Split::train);
        hard.insert(hard.end(), loaded.begin(), loaded.end());
    }
    std::vector<DiffInstance> diff;
    for (const auto& path : diff_paths) {
        auto loaded = load_diff_dataset(path);
        diff.insert(diff.end(), loaded.begin(), loaded.end());
    }

    BackendConfig backend_cfg = backend_config_from(config);
    if (backend_cfg.kind == BackendKind::mock && backend_cfg.model.empty()) {
        // Training without an explicit scorer section gets a fresh tiny model.
        backend_cfg.kind = BackendKind::seq2seq;
        backend_cfg.model = "tiny";
    }
    auto backend = make_backend(backend_cfg);

    TrainResult result = train(hard, diff, train_cfg, *backend);
    write_checkpoint(out_dir, train_cfg, result, *backend);
    std::cout << "steps " << result.losses.size() << "  initial "
              << result.initial_loss() << "  final " << result.final_loss()
              << "\ncheckpoint written to " << out_dir << "\n";
    return 0;
}

int run_predict(const std::string& checkpoint, const std::string& input,
                bool gold_exp, const std::string& shift_rule,
                const std::string& out_path) {
    auto backend = load_checkpoint(checkpoint);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw Error("cannot write predictions: " + out_path);
        out = &file;
    }

    if (looks_like_diff_file(input)) {
        ShiftRule rule = parse_shift_rule(shift_rule);
        for (const auto& inst : load_diff_dataset(input)) {
            ShiftPrediction pred = predict_shift(inst, *backend, gold_exp, rule);
            nlohmann::ordered_json rec;
            rec["id"] = inst.id;
            rec["direction"] = to_string(pred.direction);
            rec["delta_before"] = pred.delta_before;
            rec["delta_after"] = pred.delta_after;
            *out << rec.dump() << "\n";
        }
    } else {
        for (const auto& inst : load_hard_dataset(input)) {
            Prediction pred = predict_relation(inst.context, inst.pair, *backend);
            nlohmann::ordered_json rec;
            rec["id"] = inst.id;
            rec["relation"] = to_string(pred.relation);
            rec["score_before"] = pred.score_before;
            rec["score_after"] = pred.score_after;
            if (pred.tie_broken) rec["tie_broken"] = true;
            *out << rec.dump() << "\n";
        }
    }
    return 0;
}

int run_verify(const std::string& in_path, const std::string& out_path,
               const std::string& checkpoints_dir,
               const std::vector<std::string>& disabled,
               const std::string& similarity_kind) {
    std::vector<SupervisionCandidate> candidates;
    {
        std::ifstream in(in_path);
        if (!in) throw Error("cannot open candidates: " + in_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) candidates.push_back(parse_candidate(line));
        }
    }

    auto similarity = make_similarity_model(similarity_kind);
    auto general = load_checkpoint((fs::path(checkpoints_dir) / "general").string());
    auto addition =
        load_checkpoint((fs::path(checkpoints_dir) / "addition").string());
    auto explanation =
        load_checkpoint((fs::path(checkpoints_dir) / "explanation").string());

    CascadeCheckpoints checkpoints;
    checkpoints.similarity = similarity.get();
    checkpoints.general = general.get();
    checkpoints.additional_sentence = addition.get();
    checkpoints.explanation = explanation.get();

    std::vector<VerifierStage> order;
    for (VerifierStage stage : default_stage_order()) {
        bool off = false;
        for (const auto& name : disabled) {
            off |= verifier_stage_from_string(name) == stage;
        }
        if (!off) order.push_back(stage);
    }

    CascadeResult result = run_cascade(std::move(candidates), checkpoints, order);

    std::ofstream out(out_path);
    if (!out) throw Error("cannot write accepted candidates: " + out_path);
    for (const auto& candidate : result.accepted) {
        out << serialize_candidate(candidate) << "\n";
    }
    std::ofstream audit(out_path + ".audit");
    for (const auto& [id, verdict] : result.audit) {
        audit << serialize_audit_row(id, verdict) << "\n";
    }
    std::cout << "accepted " << result.accepted.size() << " candidates\n";
    return 0;
}

int run_distill(const std::string& contexts_path, int target,
                const std::string& out_dir, const std::string& config_path,
                const std::string& prompts_dir,
                const std::string& checkpoints_dir, bool mock_client,
                const std::string& similarity_kind) {
    ConfigFile config =
        config_path.empty() ? ConfigFile::parse("") : ConfigFile::load(config_path);

    DistillConfig distill_cfg;
    distill_cfg.target_accepted = target;
    distill_cfg.out_dir = out_dir;
    auto client = make_client(config, mock_client, distill_cfg.policy);

    PromptTemplate event_prompt =
        load_prompt(prompts_dir, "prompt_event_pair", PromptPurpose::event_pair);
    PromptTemplate cand_prompt =
        load_prompt(prompts_dir, "prompt_as_exp_2shot", PromptPurpose::as_and_exp);

    auto similarity = make_similarity_model(similarity_kind);
    auto general = load_checkpoint((fs::path(checkpoints_dir) / "general").string());
    auto addition =
        load_checkpoint((fs::path(checkpoints_dir) / "addition").string());
    auto explanation =
        load_checkpoint((fs::path(checkpoints_dir) / "explanation").string());

    CascadeCheckpoints checkpoints;
    checkpoints.similarity = similarity.get();
    checkpoints.general = general.get();
    checkpoints.additional_sentence = addition.get();
    checkpoints.explanation = explanation.get();

    auto judge = make_cascade_judge(checkpoints, default_stage_order());
    DistillResult result = distill(read_context_lines(contexts_path), distill_cfg,
                                   *client, event_prompt, cand_prompt, judge);
    std::cout << "accepted " << result.accepted.size() << " of "
              << result.candidates_attempted << " candidates this run\n";
    return 0;
}

int run_eval(const std::string& checkpoint, const std::string& tracie_path,
             const std::string& matres_path, const std::string& today_path,
             bool gold_exp, const std::string& shift_rule,
             const std::string& report_path) {
    auto backend = load_checkpoint(checkpoint);
    ShiftRule rule = parse_shift_rule(shift_rule);

    std::vector<DatasetResult> results;
    if (!tracie_path.empty()) {
        results.push_back(
            eval_hard(*backend, load_hard_dataset(tracie_path, Split::test), "tracie"));
    }
    if (!matres_path.empty()) {
        results.push_back(
            eval_hard(*backend, load_hard_dataset(matres_path, Split::test), "matres"));
    }
    if (!today_path.empty()) {
        auto today = load_diff_dataset(today_path);
        results.push_back(eval_today(*backend, today, false, rule, "today"));
        if (gold_exp) {
            results.push_back(
                eval_today(*backend, today, true, rule, "today_gold_exp"));
        }
    }
    if (results.empty()) throw Error("eval requires at least one dataset");

    EvalReport report = build_report(results, "checkpoint=" + checkpoint);
    std::string table = render_report(report);
    std::cout << table;
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw Error("cannot write report: " + report_path);
        out << table;
        for (const auto& rec : report.records) {
            nlohmann::ordered_json row;
            row["id"] = rec.id;
            row["gold"] = rec.gold;
            row["predicted"] = rec.predicted;
            row["score_before"] = rec.score_a;
            row["score_after"] = rec.score_b;
            out << row.dump() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal differential analysis toolkit"};
    app.require_subcommand(1);

    // stats
    std::string stats_path, stats_test_path;
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");
    stats_cmd->add_option("path", stats_path, "dataset file")->required();
    stats_cmd->add_option("--test", stats_test_path, "test-split file");

    // encode
    std::string encode_input;
    bool encode_dump = false, encode_gold_exp = false;
    auto* encode_cmd = app.add_subcommand("encode", "render entailment examples");
    encode_cmd->add_option("--input", encode_input, "dataset file")->required();
    encode_cmd->add_flag("--dump", encode_dump, "print rendered examples");
    encode_cmd->add_flag("--gold-exp", encode_gold_exp,
                         "include annotated explanations");

    // train
    std::vector<std::string> train_hard, train_diff;
    std::string train_config_path, train_out;
    auto* train_cmd = app.add_subcommand("train", "joint training");
    train_cmd->add_option("--hard", train_hard, "hard-label dataset files");
    train_cmd->add_option("--diff", train_diff, "relative-label dataset files");
    train_cmd->add_option("--config", train_config_path, "config file");
    train_cmd->add_option("--out", train_out, "checkpoint directory")->required();

    // predict
    std::string pred_checkpoint, pred_input, pred_out;
    std::string pred_shift_rule = "delta";
    bool pred_gold_exp = false;
    auto* pred_cmd = app.add_subcommand("predict", "inference");
    pred_cmd->add_option("--checkpoint", pred_checkpoint)->required();
    pred_cmd->add_option("--input", pred_input)->required();
    pred_cmd->add_option("--out", pred_out, "output file (default stdout)");
    pred_cmd->add_flag("--gold-exp", pred_gold_exp);
    pred_cmd->add_option("--shift-rule", pred_shift_rule,
                         "delta or argmax-flip");

    // verify
    std::string verify_in, verify_out, verify_checkpoints;
    std::string verify_similarity = "overlap";
    std::vector<std::string> verify_disabled;
    auto* verify_cmd = app.add_subcommand("verify", "run the verifier cascade");
    verify_cmd->add_option("--in", verify_in)->required();
    verify_cmd->add_option("--out", verify_out)->required();
    verify_cmd->add_option("--checkpoints", verify_checkpoints)->required();
    verify_cmd->add_option("--disable", verify_disabled,
                           "similarity|general|addition|explanation");
    verify_cmd->add_option("--similarity", verify_similarity,
                           "overlap or embedding");

    // distill
    std::string distill_contexts, distill_out, distill_config_path;
    std::string distill_prompts = "prompts";
    std::string distill_checkpoints;
    std::string distill_similarity = "overlap";
    int distill_n = 0;
    bool distill_mock = false;
    auto* distill_cmd = app.add_subcommand("distill", "generate supervision");
    distill_cmd->add_option("--contexts", distill_contexts)->required();
    distill_cmd->add_option("--n", distill_n, "target accepted count")->required();
    distill_cmd->add_option("--out", distill_out)->required();
    distill_cmd->add_option("--config", distill_config_path);
    distill_cmd->add_option("--prompts", distill_prompts);
    distill_cmd->add_option("--checkpoints", distill_checkpoints)->required();
    distill_cmd->add_flag("--mock-client", distill_mock,
                          "use the canned offline client");
    distill_cmd->add_option("--similarity", distill_similarity);

    // eval
    std::string eval_checkpoint, eval_tracie, eval_matres, eval_today_path;
    std::string eval_report_path;
    std::string eval_shift_rule = "delta";
    bool eval_gold_exp = false;
    auto* eval_cmd = app.add_subcommand("eval", "benchmark evaluation");
    eval_cmd->add_option("--checkpoint", eval_checkpoint)->required();
    eval_cmd->add_option("--tracie", eval_tracie);
    eval_cmd->add_option("--matres", eval_matres);
    eval_cmd->add_option("--today", eval_today_path);
    eval_cmd->add_flag("--gold-exp", eval_gold_exp);
    eval_cmd->add_option("--shift-rule", eval_shift_rule);
    eval_cmd->add_option("--report", eval_report_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats_cmd->parsed()) return run_stats(stats_path, stats_test_path);
        if (encode_cmd->parsed()) {
            return run_encode(encode_input, encode_dump, encode_gold_exp);
        }
        if (train_cmd->parsed()) {
            return run_train(train_hard, train_diff, train_config_path, train_out);
        }
        if (pred_cmd->parsed()) {
            return run_predict(pred_checkpoint, pred_input, pred_gold_exp,
                               pred_shift_rule, pred_out);
        }
        if (verify_cmd->parsed()) {
            return run_verify(verify_in, verify_out, verify_checkpoints,
                              verify_disabled, verify_similarity);
        }
        if (distill_cmd->parsed()) {
            return run_distill(distill_contexts, distill_n, distill_out,
                               distill_config_path, distill_prompts,
                               distill_checkpoints, distill_mock,
                               distill_similarity);
        }
        if (eval_cmd->parsed()) {
            return run_eval(eval_checkpoint, eval_tracie, eval_matres,
                            eval_today_path, eval_gold_exp, eval_shift_rule,
                            eval_report_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
