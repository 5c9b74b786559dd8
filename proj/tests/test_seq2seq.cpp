#include <doctest.h>

#include <cmath>
#include <random>

#include "tempdiff/seq2seq.hpp"
#include "test_util.hpp"

using namespace tempdiff;
using tempdiff::testing::TempDir;

namespace {

std::vector<std::string> tiny_corpus() {
    return {
        "the cat sat on the mat",          "the dog chased the cat",
        "rain fell on the quiet town",     "a starts before b",
        "a starts after b",                "answer: positive",
        "answer: negative",
    };
}

std::unique_ptr<Seq2SeqBackend> tiny_backend(uint64_t seed = 0) {
    auto backend = Seq2SeqBackend::fresh("tiny", 64);
    backend->initialize(tiny_corpus(), seed);
    return backend;
}

EntailmentExample example(const std::string& premise,
                          const std::string& hypothesis) {
    EntailmentExample ex;
    ex.premise = premise;
    ex.hypothesis = hypothesis;
    return ex;
}

}  // namespace

TEST_CASE("scores renormalize over the two target sequences") {
    auto backend = tiny_backend();
    ScorerOutput out =
        backend->score(example("the cat sat on the mat", "a starts before b"));
    out.validate();
    CHECK(out.p_ent + out.p_con == doctest::Approx(1.0).epsilon(1e-6));

    // Independent route: renormalize the two teacher-forced sequence
    // likelihoods computed from the raw token distributions.
    const Seq2SeqModel& model = backend->model();
    auto input = model.encode_input("the cat sat on the mat", "a starts before b");
    double logp[2];
    int i = 0;
    for (const char* target : {"answer: positive", "answer: negative"}) {
        auto ids = model.encode_target(target);
        auto dists = model.token_distributions(input, ids);
        double lp = 0.0;
        for (size_t t = 0; t < ids.size(); ++t) {
            lp += std::log(dists[t][static_cast<size_t>(ids[t])]);
        }
        logp[i++] = lp;
    }
    double expected = std::exp(logp[0]) / (std::exp(logp[0]) + std::exp(logp[1]));
    CHECK(out.p_ent == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("scoring an uninitialized backend fails") {
    auto backend = Seq2SeqBackend::fresh("tiny");
    CHECK_THROWS(backend->score(example("p", "h")));
}

TEST_CASE("long inputs truncate with a recorded warning, never a crash") {
    auto backend = tiny_backend();
    std::string premise;
    for (int i = 0; i < 500; ++i) premise += "word ";
    CHECK(backend->truncation_count() == 0);
    CHECK_NOTHROW(backend->score(example(premise, "a starts before b")));
    CHECK(backend->truncation_count() == 1);
}

TEST_CASE("model gradients match central finite differences") {
    auto backend = tiny_backend(13);
    Seq2SeqModel& model = backend->model();

    auto input = model.encode_input("the dog chased the cat", "a starts after b");
    auto target = model.encode_target("answer: positive");

    Seq2SeqModel::Tape tape;
    model.sequence_logprob(input, target, &tape);
    auto grads = model.make_gradients();
    // Loss L = -logp, so dL/dlogp = -1.
    model.backward(tape, -1.0, grads);

    std::mt19937_64 rng(5);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 25) {
        size_t idx = rng() % model.flat_size();
        double orig = model.get_flat(idx);
        model.set_flat(idx, orig + h);
        double up = -model.sequence_logprob(input, target);
        model.set_flat(idx, orig - h);
        double down = -model.sequence_logprob(input, target);
        model.set_flat(idx, orig);

        double numeric = (up - down) / (2.0 * h);
        double analytic = model.grad_flat(grads, idx);
        CHECK(analytic == doctest::Approx(numeric).epsilon(1e-4).scale(1.0));
        ++checked;
    }
}

TEST_CASE("adam steps reduce the sequence loss") {
    auto backend = tiny_backend(21);
    EntailmentExample ex = example("rain fell on the quiet town", "a starts before b");

    auto loss = [&]() {
        PairScore s = backend->score_pair(ex, false);
        return -s.logp_pos;  // teach "answer: positive"
    };
    double initial = loss();
    for (int step = 0; step < 30; ++step) {
        backend->zero_grad();
        PairScore s = backend->score_pair(ex, true);
        backend->backward(s.tape, -1.0, 0.0);
        backend->step(0.05);
    }
    CHECK(loss() < 0.5 * initial);
}

TEST_CASE("checkpoints restore identical scores") {
    TempDir dir("ckpt");
    auto backend = tiny_backend(9);
    EntailmentExample ex =
        example("the dog chased the cat", "a starts before b");
    double before_save = backend->score(ex).p_ent;

    std::string path = dir.str() + "/weights.bin";
    backend->save(path);
    auto loaded = Seq2SeqModel::load(path);
    Seq2SeqBackend restored(std::move(loaded));
    CHECK(restored.score(ex).p_ent == doctest::Approx(before_save).epsilon(1e-12));
    CHECK(restored.model().vocab().size() == backend->model().vocab().size());
}

TEST_CASE("identical seeds give identical models") {
    auto a = tiny_backend(33);
    auto b = tiny_backend(33);
    EntailmentExample ex = example("the cat sat on the mat", "a starts after b");
    CHECK(a->score(ex).p_ent == b->score(ex).p_ent);
}

TEST_CASE("presets size the hidden dimension") {
    CHECK(Seq2SeqBackend::fresh("tiny")->model().hidden_dim() == 32);
    CHECK(Seq2SeqBackend::fresh("small")->model().hidden_dim() == 64);
    CHECK_THROWS(Seq2SeqBackend::fresh("enormous"));
}
