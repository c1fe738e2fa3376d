#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/model.hpp"
#include "symlearn/numeric.hpp"

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
    spec.seed = 1;
    if (kind == ModelKind::invariantnet) spec.groups = {"rot90", "flip"};
    return spec;
}

double total_loss(const TrainedModel& model, const Matrix& x, std::span<const int> y,
                  std::span<const double> noise) {
    Matrix no_features;
    return model_loss(model, x, no_features, y, noise, 100).total;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("model kind names round-trip") {
    for (ModelKind k : {ModelKind::invariantnet, ModelKind::rotnet, ModelKind::flipnet,
                        ModelKind::mlp}) {
        CHECK(model_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(model_kind_from_string("cnn"), ConfigError);
}

TEST_CASE("resolve_prior validates type and shape") {
    PriorSpec jeffreys;  // default type
    DirichletPrior p = resolve_prior(jeffreys, 3);
    CHECK(p.alpha == Vector{0.5, 0.5, 0.5});

    PriorSpec jeffreys_with_alpha{"jeffreys", {1.0}};
    CHECK_THROWS_AS(resolve_prior(jeffreys_with_alpha, 3), ConfigError);

    PriorSpec beta{"beta", {2.0, 5.0}};
    CHECK(resolve_prior(beta, 2).alpha == Vector{2.0, 5.0});
    CHECK_THROWS_AS(resolve_prior(beta, 3), ConfigError);  // beta is two schemes only
    PriorSpec beta_short{"beta", {2.0}};
    CHECK_THROWS_AS(resolve_prior(beta_short, 2), ConfigError);

    PriorSpec dir{"dirichlet", {2.0, 2.0, 2.0}};
    CHECK(resolve_prior(dir, 3).alpha == Vector{2.0, 2.0, 2.0});
    PriorSpec dir_wrong{"dirichlet", {2.0, 2.0}};
    CHECK_THROWS_AS(resolve_prior(dir_wrong, 3), ConfigError);

    PriorSpec nonpositive{"dirichlet", {2.0, 0.0, 2.0}};
    CHECK_THROWS_AS(resolve_prior(nonpositive, 3), ConfigError);

    PriorSpec typo{"jeffries", {}};
    CHECK_THROWS_AS(resolve_prior(typo, 3), ConfigError);
}

TEST_CASE("parameter counts for the standard 28x28 configurations") {
    // Counted by hand. mlp: 784*100 + 100 + 100*10 + 10.
    ModelSpec mlp;
    mlp.kind = ModelKind::mlp;
    CHECK(parameter_count(build_model(mlp)) == 79510);

    // Quarter turns tile the 28x28 grid into 196 four-cell orbits:
    // 100*196 + 100 + 100*10 + 10.
    ModelSpec rot;
    rot.kind = ModelKind::rotnet;
    CHECK(parameter_count(build_model(rot)) == 20710);

    // The flip group also yields 196 orbits on an even grid.
    ModelSpec flip;
    flip.kind = ModelKind::flipnet;
    CHECK(parameter_count(build_model(flip)) == 20710);

    // Two candidate schemes, literal identity: coefficient columns
    // 196 + 196 = 392, plus 3 scheme logits.
    ModelSpec inv;
    inv.kind = ModelKind::invariantnet;
    inv.groups = {"rot90", "flip"};
    CHECK(parameter_count(build_model(inv)) == 40313);
}

TEST_CASE("build_model is deterministic in the spec seed") {
    ModelSpec spec = tiny_spec(ModelKind::invariantnet);
    TrainedModel a = build_model(spec);
    TrainedModel b = build_model(spec);
    spec.seed = 2;
    TrainedModel c = build_model(spec);

    auto va = parameter_views(a);
    auto vb = parameter_views(b);
    auto vc = parameter_views(c);
    REQUIRE(va.size() == vb.size());
    bool identical = true, different = false;
    for (std::size_t g = 0; g < va.size(); ++g) {
        for (std::size_t i = 0; i < va[g].size(); ++i) {
            identical = identical && va[g][i] == vb[g][i];
            different = different || va[g][i] != vc[g][i];
        }
    }
    CHECK(identical);
    CHECK(different);
}

TEST_CASE("build_model wires the layer matching the kind") {
    TrainedModel mlp = build_model(tiny_spec(ModelKind::mlp));
    CHECK(mlp.dense1.W.rows() == 4);
    CHECK(mlp.dense1.W.cols() == 9);
    CHECK(mlp.fixed1.A.empty());
    CHECK(mlp.prob1.A.empty());
    CHECK(mlp.out.W.rows() == 3);
    CHECK(mlp.mean_pi().empty());

    TrainedModel rot = build_model(tiny_spec(ModelKind::rotnet));
    CHECK(rot.fixed1.basis.group_name() == "rot90");
    CHECK(rot.fixed1.A.rows() == 4);
    CHECK(rot.fixed1.A.cols() == 3);  // 3x3 grid: corners, edges, center
    CHECK(rot.dense1.W.empty());

    TrainedModel flip = build_model(tiny_spec(ModelKind::flipnet));
    CHECK(flip.fixed1.basis.group_name() == "flip");

    TrainedModel inv = build_model(tiny_spec(ModelKind::invariantnet));
    CHECK(inv.prob1.scheme_count() == 3);
    CHECK(inv.prob1.input_dim == 9);
    REQUIRE(inv.mean_pi().size() == 3);
    // Zero-initialized logits: the scheme distribution starts uniform.
    for (double p : inv.mean_pi()) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("build_model rejects inconsistent specs") {
    ModelSpec no_groups = tiny_spec(ModelKind::invariantnet);
    no_groups.groups.clear();
    CHECK_THROWS_AS(build_model(no_groups), ConfigError);

    ModelSpec bad_grid = tiny_spec(ModelKind::mlp);
    bad_grid.input_dim = 10;  // not grid_side^2
    CHECK_THROWS_AS(build_model(bad_grid), ConfigError);

    ModelSpec one_class = tiny_spec(ModelKind::mlp);
    one_class.class_count = 1;
    CHECK_THROWS_AS(build_model(one_class), ConfigError);

    ModelSpec bad_prior = tiny_spec(ModelKind::invariantnet);
    bad_prior.prior = PriorSpec{"beta", {1.0, 1.0}};  // 3 schemes here
    CHECK_THROWS_AS(build_model(bad_prior), ConfigError);
}

TEST_CASE("model_logits composes the layers it claims to") {
    RngState data_rng(7);
    Matrix x = test::random_matrix(data_rng, 5, 9, 0.3);

    TrainedModel mlp = build_model(tiny_spec(ModelKind::mlp));
    Matrix expected = dense_forward(mlp.out, dense_forward(mlp.dense1, x));
    CHECK(max_abs_diff(model_logits(mlp, x), expected) == 0.0);

    TrainedModel inv = build_model(tiny_spec(ModelKind::invariantnet));
    Matrix hidden = prob_forward(inv.prob1, inv.mean_pi(), x);
    Matrix expected_inv = dense_forward(inv.out, hidden);
    CHECK(max_abs_diff(model_logits(inv, x), expected_inv) == 0.0);
}

TEST_CASE("predict breaks ties toward the lower class index") {
    TrainedModel model = build_model(tiny_spec(ModelKind::mlp));
    // Zero output layer: every class gets the same logit.
    model.out.W = Matrix(3, 4);
    model.out.b = {0.0, 0.0, 0.0};
    Matrix x(2, 9, 0.5);
    std::vector<int> pred = predict(model, x);
    CHECK(pred == std::vector<int>{0, 0});

    // A strictly higher logit must win over the tie rule.
    model.out.b = {0.0, 0.1, 0.0};
    CHECK(predict(model, x) == std::vector<int>{1, 1});
}

TEST_CASE("evaluate crosses its internal chunk boundary consistently") {
    ImageDataset ds = blob_dataset(300, 4, 3, 8);  // 1200 rows > one chunk
    ModelSpec spec = tiny_spec(ModelKind::mlp);
    spec.class_count = 4;
    TrainedModel model = build_model(spec);

    std::vector<int> pred = predict(model, ds.images);
    double hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == ds.labels[i]) ++hits;
    CHECK(evaluate(model, ds) == doctest::Approx(hits / 1200.0).epsilon(1e-15));
}

TEST_CASE("evaluate rejects bad datasets") {
    ModelSpec spec = tiny_spec(ModelKind::mlp);
    TrainedModel model = build_model(spec);

    ImageDataset empty;
    empty.grid_side = 3;
    empty.images = Matrix(0, 9);
    CHECK_THROWS_AS(evaluate(model, empty), DomainError);

    ImageDataset high_label = blob_dataset(2, 3, 3, 9);
    high_label.labels[0] = 7;  // beyond the model's 3 classes
    high_label.class_count = 8;
    CHECK_THROWS_AS(evaluate(model, high_label), DataError);
}

TEST_CASE("precompute_features matches the per-layer feature maps") {
    RngState rng(10);
    Matrix x = test::random_matrix(rng, 6, 9, 0.3);

    TrainedModel inv = build_model(tiny_spec(ModelKind::invariantnet));
    CHECK(precompute_features(inv, x) == prob_features(inv.prob1, x));

    TrainedModel rot = build_model(tiny_spec(ModelKind::rotnet));
    CHECK(precompute_features(rot, x) == rot.fixed1.basis.apply_batch(x));

    TrainedModel mlp = build_model(tiny_spec(ModelKind::mlp));
    CHECK(precompute_features(mlp, x).empty());
}

TEST_CASE("loss via precomputed features is identical to the direct path") {
    ImageDataset ds = blob_dataset(3, 3, 3, 11);
    std::vector<int> y(ds.labels);
    Vector noise{0.3, -0.2, 0.5};

    for (ModelKind kind : {ModelKind::invariantnet, ModelKind::rotnet, ModelKind::mlp}) {
        TrainedModel model = build_model(tiny_spec(kind));
        Matrix feats = precompute_features(model, ds.images);
        Matrix none;
        std::span<const double> n =
            kind == ModelKind::invariantnet ? std::span<const double>(noise)
                                            : std::span<const double>();
        MapLossReport direct = model_loss(model, ds.images, none, y, n, 50);
        MapLossReport via = model_loss(model, ds.images, feats, y, n, 50);
        CHECK(direct.total == via.total);
        CHECK(direct.nll == via.nll);
    }
}

TEST_CASE("full-model gradients match finite differences for every kind") {
    ImageDataset ds = blob_dataset(2, 3, 3, 12);
    std::vector<int> y(ds.labels);
    Vector noise{0.4, -0.1, 0.2};

    for (ModelKind kind :
         {ModelKind::mlp, ModelKind::rotnet, ModelKind::flipnet, ModelKind::invariantnet}) {
        CAPTURE(to_string(kind));
        int configs_checked = 0;
        for (std::uint64_t seed = 1; configs_checked < 2 && seed < 40; ++seed) {
            ModelSpec spec = tiny_spec(kind);
            spec.seed = seed;
            TrainedModel model = build_model(spec);
            std::span<const double> n = kind == ModelKind::invariantnet
                                            ? std::span<const double>(noise)
                                            : std::span<const double>();

            ModelGrads grads;
            Matrix none;
            MapLossReport report =
                model_loss_and_grads(model, ds.images, none, y, n, 100, grads);
            CHECK(report.total == doctest::Approx(total_loss(model, ds.images, y, n))
                                      .epsilon(1e-12));

            auto params = parameter_views(model);
            auto analytic = gradient_views(grads, kind);
            REQUIRE(params.size() == analytic.size());

            // Skip configurations that park a pre-activation on the relu kink.
            double worst = 0.0;
            bool kink = false;
            for (std::size_t g = 0; g < params.size() && !kink; ++g) {
                for (std::size_t i = 0; i < params[g].size(); ++i) {
                    auto loss = [&] { return total_loss(model, ds.images, y, n); };
                    double fd = test::fd_slope(loss, params[g][i]);
                    double err = test::rel_err(analytic[g][i], fd);
                    worst = std::max(worst, err);
                    if (err > 1e-5) {
                        kink = true;
                        break;
                    }
                }
            }
            if (kink) continue;
            ++configs_checked;
            CHECK(worst < 1e-5);
        }
        CHECK(configs_checked == 2);
    }
}

TEST_CASE("gradient_views exposes the logits slot only for the learnable kind") {
    ImageDataset ds = blob_dataset(2, 3, 3, 13);
    std::vector<int> y(ds.labels);
    Vector noise{0.1, 0.2, -0.3};

    TrainedModel inv = build_model(tiny_spec(ModelKind::invariantnet));
    ModelGrads grads;
    Matrix none;
    model_loss_and_grads(inv, ds.images, none, y, noise, 100, grads);
    CHECK(gradient_views(grads, ModelKind::invariantnet).size() == 5);
    CHECK(parameter_views(inv).size() == 5);

    TrainedModel mlp = build_model(tiny_spec(ModelKind::mlp));
    ModelGrads mgrads;
    model_loss_and_grads(mlp, ds.images, none, y, {}, 100, mgrads);
    CHECK(gradient_views(mgrads, ModelKind::mlp).size() == 4);
    CHECK(parameter_views(mlp).size() == 4);
}

}  // TEST_SUITE
