#include "doctest.h"

#include <string>
#include <vector>

#include "helpers.hpp"
#include "symlearn/checkpoint.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/fsio.hpp"

using namespace symlearn;
using test::blob_dataset;

namespace {

ModelSpec tiny_spec(ModelKind kind) {
    ModelSpec spec;
    spec.kind = kind;
    spec.grid_side = 3;
    spec.input_dim = 9;
    spec.hidden_width = 4;
    spec.class_count = 3;
    spec.seed = 17;
    if (kind == ModelKind::invariantnet) spec.groups = {"rot90", "flip"};
    return spec;
}

// Nudge every parameter so the saved model differs from a fresh build.
void scramble(TrainedModel& model) {
    double bump = 0.001;
    for (auto view : parameter_views(model)) {
        for (double& x : view) {
            x += bump;
            bump += 0.001;
        }
    }
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("spec_hash is stable for equal specs and sensitive to changes") {
    ModelSpec a = tiny_spec(ModelKind::invariantnet);
    ModelSpec b = tiny_spec(ModelKind::invariantnet);
    CHECK(spec_hash(a) == spec_hash(b));

    b.hidden_width = 5;
    CHECK(spec_hash(a) != spec_hash(b));

    ModelSpec c = tiny_spec(ModelKind::invariantnet);
    c.groups = {"flip", "rot90"};  // order matters: different scheme indices
    CHECK(spec_hash(a) != spec_hash(c));
}

TEST_CASE("save and load round-trip every model kind bit for bit") {
    test::TempDir tmp;
    ImageDataset probe = blob_dataset(4, 3, 3, 50);

    for (ModelKind kind : {ModelKind::mlp, ModelKind::rotnet, ModelKind::flipnet,
                           ModelKind::invariantnet}) {
        CAPTURE(to_string(kind));
        TrainedModel model = build_model(tiny_spec(kind));
        scramble(model);

        std::string path = tmp.file(to_string(kind) + ".json");
        save_model(model, path);
        TrainedModel loaded = load_model(path);

        auto original = parameter_views(model);
        auto restored = parameter_views(loaded);
        REQUIRE(original.size() == restored.size());
        for (std::size_t g = 0; g < original.size(); ++g) {
            REQUIRE(original[g].size() == restored[g].size());
            for (std::size_t i = 0; i < original[g].size(); ++i)
                CHECK(original[g][i] == restored[g][i]);
        }

        CHECK(loaded.spec.kind == model.spec.kind);
        CHECK(loaded.spec.seed == model.spec.seed);
        CHECK(loaded.spec.groups == model.spec.groups);
        CHECK(loaded.mean_pi() == model.mean_pi());

        // Bit-identical parameters imply bit-identical behavior.
        CHECK(max_abs_diff(model_logits(loaded, probe.images),
                           model_logits(model, probe.images)) == 0.0);
        CHECK(evaluate(loaded, probe) == evaluate(model, probe));
    }
}

TEST_CASE("saving twice produces identical bytes") {
    test::TempDir tmp;
    TrainedModel model = build_model(tiny_spec(ModelKind::invariantnet));
    save_model(model, tmp.file("a.json"));
    save_model(model, tmp.file("b.json"));
    CHECK(read_text_file(tmp.file("a.json")) == read_text_file(tmp.file("b.json")));
}

TEST_CASE("a spec edited behind the hash's back is rejected") {
    test::TempDir tmp;
    TrainedModel model = build_model(tiny_spec(ModelKind::mlp));
    std::string path = tmp.file("m.json");
    save_model(model, path);

    std::string doc = read_text_file(path);
    std::string tampered = replace_once(doc, "\"hidden_width\": 4", "\"hidden_width\": 8");
    atomic_write_text(path, tampered);
    CHECK_THROWS_AS(load_model(path), ParseError);
}

TEST_CASE("unsupported format versions are rejected") {
    test::TempDir tmp;
    TrainedModel model = build_model(tiny_spec(ModelKind::mlp));
    std::string path = tmp.file("m.json");
    save_model(model, path);

    std::string doc = read_text_file(path);
    std::string tampered = replace_once(doc, "\"format_version\": 1", "\"format_version\": 99");
    atomic_write_text(path, tampered);
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("version"), ParseError);
}

TEST_CASE("malformed or incomplete JSON is rejected") {
    test::TempDir tmp;
    std::string path = tmp.file("broken.json");

    atomic_write_text(path, "{ not json");
    CHECK_THROWS_AS(load_model(path), ParseError);

    atomic_write_text(path, "{\"format_version\": 1}\n");
    CHECK_THROWS_AS(load_model(path), ParseError);
}

TEST_CASE("parameter arrays must match the spec's shapes") {
    test::TempDir tmp;
    TrainedModel model = build_model(tiny_spec(ModelKind::mlp));
    std::string path = tmp.file("m.json");
    save_model(model, path);

    // Drop one value from b1 (length 4 in this spec).
    std::string doc = read_text_file(path);
    auto pos = doc.find("\"b1\": [");
    REQUIRE(pos != std::string::npos);
    auto comma = doc.find(',', pos);
    REQUIRE(comma != std::string::npos);
    doc.erase(pos + 7, comma - (pos + 7) + 1);
    atomic_write_text(path, doc);
    CHECK_THROWS_AS(load_model(path), ParseError);
}

TEST_CASE("loading a missing file throws IoError") {
    test::TempDir tmp;
    CHECK_THROWS_AS(load_model(tmp.file("absent.json")), IoError);
}

}  // TEST_SUITE
