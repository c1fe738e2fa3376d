#include "symlearn/checkpoint.hpp"

#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/fsio.hpp"

namespace symlearn {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string identity_mode_name(IdentityMode mode) {
    return mode == IdentityMode::paper_literal ? "paper_literal" : "augmented";
}

IdentityMode identity_mode_from(const std::string& name) {
    if (name == "paper_literal") return IdentityMode::paper_literal;
    if (name == "augmented") return IdentityMode::augmented;
    throw ParseError("unknown identity mode \"" + name +
                     "\"; expected paper_literal or augmented");
}

json spec_to_json(const ModelSpec& spec) {
    return json{{"kind", to_string(spec.kind)},
                {"grid_side", spec.grid_side},
                {"input_dim", spec.input_dim},
                {"hidden_width", spec.hidden_width},
                {"class_count", spec.class_count},
                {"groups", spec.groups},
                {"identity_mode", identity_mode_name(spec.identity_mode)},
                {"prior", json{{"type", spec.prior.type}, {"alpha", spec.prior.alpha}}},
                {"seed", spec.seed}};
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec spec;
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    spec.grid_side = j.at("grid_side").get<std::size_t>();
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.hidden_width = j.at("hidden_width").get<std::size_t>();
    spec.class_count = j.at("class_count").get<std::size_t>();
    spec.groups = j.at("groups").get<std::vector<std::string>>();
    spec.identity_mode = identity_mode_from(j.at("identity_mode").get<std::string>());
    spec.prior.type = j.at("prior").at("type").get<std::string>();
    spec.prior.alpha = j.at("prior").at("alpha").get<Vector>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return s;
}

Vector flat_copy(const Matrix& m) { return Vector(m.data(), m.data() + m.size()); }

void fill_matrix(Matrix& m, const json& j, const char* key) {
    const auto values = j.at(key).get<Vector>();
    if (values.size() != m.size()) {
        throw ParseError(std::string("checkpoint parameter \"") + key + "\" has " +
                         std::to_string(values.size()) + " values, expected " +
                         std::to_string(m.size()));
    }
    std::copy(values.begin(), values.end(), m.data());
}

void fill_vector(Vector& v, const json& j, const char* key) {
    const auto values = j.at(key).get<Vector>();
    if (values.size() != v.size()) {
        throw ParseError(std::string("checkpoint parameter \"") + key + "\" has " +
                         std::to_string(values.size()) + " values, expected " +
                         std::to_string(v.size()));
    }
    v = values;
}

}  // namespace

std::uint64_t spec_hash(const ModelSpec& spec) { return fnv1a64(spec_to_json(spec).dump()); }

void save_model(const TrainedModel& model, const std::string& path) {
    json params;
    switch (model.spec.kind) {
        case ModelKind::mlp:
            params["W1"] = flat_copy(model.dense1.W);
            params["b1"] = model.dense1.b;
            break;
        case ModelKind::rotnet:
        case ModelKind::flipnet:
            params["A1"] = flat_copy(model.fixed1.A);
            params["b1"] = model.fixed1.b;
            break;
        case ModelKind::invariantnet:
            params["A1"] = flat_copy(model.prob1.A);
            params["b1"] = model.prob1.b;
            params["phi"] = model.prob1.logits;
            break;
    }
    params["W2"] = flat_copy(model.out.W);
    params["b2"] = model.out.b;

    json doc{{"format_version", kFormatVersion},
             {"spec", spec_to_json(model.spec)},
             {"spec_hash", hash_hex(spec_hash(model.spec))},
             {"params", std::move(params)},
             {"final_pi", model.mean_pi()}};
    atomic_write_text(path, doc.dump(2) + "\n");
}

TrainedModel load_model(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("checkpoint " + path + " is not valid JSON: " + e.what());
    }
    try {
        const int version = doc.at("format_version").get<int>();
        if (version != kFormatVersion) {
            throw ParseError("checkpoint " + path + " has format_version " +
                             std::to_string(version) + ", this build reads version " +
                             std::to_string(kFormatVersion));
        }
        const ModelSpec spec = spec_from_json(doc.at("spec"));
        const std::string stored_hash = doc.at("spec_hash").get<std::string>();
        if (stored_hash != hash_hex(spec_hash(spec))) {
            throw ParseError("checkpoint " + path + " spec_hash " + stored_hash +
                             " does not match its spec (corrupt or edited file)");
        }
        TrainedModel model = build_model(spec);
        const json& params = doc.at("params");
        switch (spec.kind) {
            case ModelKind::mlp:
                fill_matrix(model.dense1.W, params, "W1");
                fill_vector(model.dense1.b, params, "b1");
                break;
            case ModelKind::rotnet:
            case ModelKind::flipnet:
                fill_matrix(model.fixed1.A, params, "A1");
                fill_vector(model.fixed1.b, params, "b1");
                break;
            case ModelKind::invariantnet:
                fill_matrix(model.prob1.A, params, "A1");
                fill_vector(model.prob1.b, params, "b1");
                fill_vector(model.prob1.logits, params, "phi");
                break;
        }
        fill_matrix(model.out.W, params, "W2");
        fill_vector(model.out.b, params, "b2");
        return model;
    } catch (const json::exception& e) {
        throw ParseError("checkpoint " + path + " is missing or mistypes a field: " + e.what());
    }
}

}  // namespace symlearn
