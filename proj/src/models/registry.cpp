#include "predictor.hpp"

#include "wfbt/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace wfbt {

namespace {

struct KindInfo {
    ModelKind kind;
    std::string_view name;
    Task task;
};

constexpr std::array<KindInfo, 18> kKinds{{
    {ModelKind::LogisticC, "logistic_c", Task::Classifier},
    {ModelKind::RidgeC, "ridge_c", Task::Classifier},
    {ModelKind::PerceptronC, "perceptron_c", Task::Classifier},
    {ModelKind::SgdC, "sgd_c", Task::Classifier},
    {ModelKind::KnnC, "knn_c", Task::Classifier},
    {ModelKind::BernoulliNbC, "bernoulli_nb_c", Task::Classifier},
    {ModelKind::DecisionTreeC, "decision_tree_c", Task::Classifier},
    {ModelKind::ExtraTreeC, "extra_tree_c", Task::Classifier},
    {ModelKind::RandomForestC, "random_forest_c", Task::Classifier},
    {ModelKind::BaggingC, "bagging_c", Task::Classifier},
    {ModelKind::OlsR, "ols_r", Task::Regressor},
    {ModelKind::RidgeR, "ridge_r", Task::Regressor},
    {ModelKind::SgdR, "sgd_r", Task::Regressor},
    {ModelKind::KnnR, "knn_r", Task::Regressor},
    {ModelKind::DecisionTreeR, "decision_tree_r", Task::Regressor},
    {ModelKind::ExtraTreeR, "extra_tree_r", Task::Regressor},
    {ModelKind::RandomForestR, "random_forest_r", Task::Regressor},
    {ModelKind::BaggingR, "bagging_r", Task::Regressor},
}};

const KindInfo& info(ModelKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) {
            return k;
        }
    }
    return kKinds[0];
}

constexpr double kInf = std::numeric_limits<double>::infinity();

/// One accepted parameter. `search` is empty for fixed (non-tunable) ones;
/// [min, max] bounds what fit() accepts, which may be wider than the search
/// range (e.g. max_depth = 0 meaning unlimited).
struct ParamDecl {
    std::string name;
    Distribution::Type type;
    ParamValue default_value;
    std::optional<Distribution> search;
    double min = -kInf;
    double max = kInf;
    bool min_exclusive = false;
    std::vector<std::string> choices;
};

ParamDecl learning_rate(double def) {
    return {"learning_rate", Distribution::Type::LogUniform, def, Distribution::log_uniform(1e-4, 1.0), 0.0, 10.0,
            true, {}};
}
ParamDecl epochs(std::int64_t def) {
    return {"epochs", Distribution::Type::Int, def, Distribution::integer(5, 200), 1, 100000, false, {}};
}
ParamDecl batch_size() {
    return {"batch_size", Distribution::Type::Int, std::int64_t{8}, Distribution::integer(1, 32), 1, 1e9, false, {}};
}
ParamDecl alpha() {
    return {"alpha", Distribution::Type::LogUniform, 1e-4, Distribution::log_uniform(1e-6, 1.0), 0.0, 1e6, false, {}};
}
ParamDecl ridge_lambda() {
    return {"lambda", Distribution::Type::LogUniform, 1.0, Distribution::log_uniform(1e-6, 1e3), 0.0, kInf, false, {}};
}
ParamDecl neighbors() {
    return {"k", Distribution::Type::Int, std::int64_t{5}, Distribution::integer(1, 25), 1, 1e9, false, {}};
}
ParamDecl max_depth() {
    return {"max_depth", Distribution::Type::Int, std::int64_t{0}, Distribution::integer(1, 12), 0, 10000, false, {}};
}
ParamDecl min_samples_leaf() {
    return {"min_samples_leaf", Distribution::Type::Int, std::int64_t{1}, Distribution::integer(1, 20), 1, 1e9, false,
            {}};
}
ParamDecl members(std::int64_t def) {
    return {"n_members", Distribution::Type::Int, def, Distribution::integer(5, 200), 1, 100000, false, {}};
}
ParamDecl max_features() {
    return {"max_features", Distribution::Type::Uniform, 1.0, Distribution::uniform(0.1, 1.0), 0.0, 1.0, true, {}};
}
ParamDecl bootstrap() {
    return {"bootstrap", Distribution::Type::Categorical, std::string("true"), std::nullopt, 0, 0, false,
            {"true", "false"}};
}

std::vector<ParamDecl> declarations(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogisticC:
            return {learning_rate(0.05), epochs(50), batch_size(), alpha()};
        case ModelKind::SgdC: {
            ParamDecl loss{"loss", Distribution::Type::Categorical, std::string("hinge"),
                           Distribution::categorical({"hinge", "log"}), 0, 0, false, {"hinge", "log"}};
            return {learning_rate(0.05), epochs(50), batch_size(), alpha(), loss};
        }
        case ModelKind::SgdR:
            return {learning_rate(0.05), epochs(50), batch_size(), alpha()};
        case ModelKind::PerceptronC:
            return {learning_rate(1.0), epochs(50)};
        case ModelKind::RidgeC:
        case ModelKind::RidgeR:
            return {ridge_lambda()};
        case ModelKind::OlsR:
            return {};
        case ModelKind::KnnC:
        case ModelKind::KnnR:
            return {neighbors()};
        case ModelKind::BernoulliNbC:
            return {{"smoothing", Distribution::Type::LogUniform, 1.0, Distribution::log_uniform(1e-3, 10.0), 0.0, kInf,
                     true, {}}};
        case ModelKind::DecisionTreeC:
        case ModelKind::DecisionTreeR:
        case ModelKind::ExtraTreeC:
        case ModelKind::ExtraTreeR:
            return {max_depth(), min_samples_leaf()};
        case ModelKind::RandomForestC:
        case ModelKind::RandomForestR:
            return {members(100), max_depth(), min_samples_leaf(), max_features(), bootstrap()};
        case ModelKind::BaggingC:
        case ModelKind::BaggingR:
            return {members(10), max_depth(), min_samples_leaf(), bootstrap()};
    }
    return {};
}

ParamValue coerce(const ParamDecl& decl, const ParamValue& value, ModelKind kind) {
    const auto fail = [&](const std::string& why) -> ParamValue {
        throw Error(ErrorCode::InvalidParam,
                    std::string(kind_name(kind)) + "." + decl.name + " = " + to_string(value) + ": " + why);
    };
    switch (decl.type) {
        case Distribution::Type::Categorical: {
            const auto* s = std::get_if<std::string>(&value);
            if (s == nullptr) {
                return fail("expected a string");
            }
            for (const auto& c : decl.choices) {
                if (c == *s) {
                    return value;
                }
            }
            return fail("not one of the declared choices");
        }
        case Distribution::Type::Int: {
            std::int64_t v = 0;
            if (const auto* i = std::get_if<std::int64_t>(&value)) {
                v = *i;
            } else if (const auto* d = std::get_if<double>(&value); d && std::isfinite(*d) && *d == std::floor(*d)) {
                v = static_cast<std::int64_t>(*d);
            } else {
                return fail("expected an integer");
            }
            if (static_cast<double>(v) < decl.min || static_cast<double>(v) > decl.max) {
                return fail("out of bounds");
            }
            return v;
        }
        case Distribution::Type::Uniform:
        case Distribution::Type::LogUniform: {
            double v = 0.0;
            if (const auto* i = std::get_if<std::int64_t>(&value)) {
                v = static_cast<double>(*i);
            } else if (const auto* d = std::get_if<double>(&value)) {
                v = *d;
            } else {
                return fail("expected a number");
            }
            const bool low_ok = decl.min_exclusive ? v > decl.min : v >= decl.min;
            if (!std::isfinite(v) || !low_ok || v > decl.max) {
                return fail("out of bounds");
            }
            return v;
        }
    }
    return value;
}

}  // namespace

Task task_of(ModelKind kind) noexcept { return info(kind).task; }

std::string_view kind_name(ModelKind kind) noexcept { return info(kind).name; }

std::string_view task_name(Task task) noexcept { return task == Task::Classifier ? "classifier" : "regressor"; }

ModelKind parse_kind(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name) {
            return k.kind;
        }
    }
    throw Error(ErrorCode::InvalidParam, "unknown model kind '" + std::string(name) + "'");
}

const std::vector<ModelKind>& all_kinds() {
    static const std::vector<ModelKind> kinds = [] {
        std::vector<ModelKind> out;
        for (const auto& k : kKinds) {
            out.push_back(k.kind);
        }
        return out;
    }();
    return kinds;
}

std::string to_string(const ParamValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
        return std::to_string(*i);
    }
    if (const auto* d = std::get_if<double>(&value)) {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
        return std::string(buf, ptr);
    }
    return std::get<std::string>(value);
}

Distribution Distribution::uniform(double lo, double hi) { return {Type::Uniform, lo, hi, {}}; }
Distribution Distribution::log_uniform(double lo, double hi) { return {Type::LogUniform, lo, hi, {}}; }
Distribution Distribution::integer(std::int64_t lo, std::int64_t hi) {
    return {Type::Int, static_cast<double>(lo), static_cast<double>(hi), {}};
}
Distribution Distribution::categorical(std::vector<std::string> choices) {
    return {Type::Categorical, 0.0, 0.0, std::move(choices)};
}

bool Distribution::contains(const ParamValue& value) const {
    switch (type) {
        case Type::Categorical: {
            const auto* s = std::get_if<std::string>(&value);
            return s != nullptr && std::find(choices.begin(), choices.end(), *s) != choices.end();
        }
        case Type::Int: {
            const auto* i = std::get_if<std::int64_t>(&value);
            return i != nullptr && static_cast<double>(*i) >= lo && static_cast<double>(*i) <= hi;
        }
        case Type::Uniform:
        case Type::LogUniform: {
            const auto* d = std::get_if<double>(&value);
            return d != nullptr && *d >= lo && *d <= hi;
        }
    }
    return false;
}

const HyperParamSpace::Dimension* HyperParamSpace::find(std::string_view name) const {
    for (const auto& d : dimensions) {
        if (d.name == name) {
            return &d;
        }
    }
    return nullptr;
}

HyperParamSpace default_space(ModelKind kind) {
    HyperParamSpace space;
    for (auto& decl : declarations(kind)) {
        if (decl.search) {
            space.dimensions.push_back({decl.name, *decl.search});
        }
    }
    return space;
}

Params default_params(ModelKind kind) {
    Params out;
    for (auto& decl : declarations(kind)) {
        out.emplace(decl.name, decl.default_value);
    }
    return out;
}

Params resolve_params(ModelKind kind, const Params& overrides) {
    const auto decls = declarations(kind);
    Params out;
    for (const auto& decl : decls) {
        out.emplace(decl.name, decl.default_value);
    }
    for (const auto& [name, value] : overrides) {
        const auto it = std::find_if(decls.begin(), decls.end(), [&](const ParamDecl& d) { return d.name == name; });
        if (it == decls.end()) {
            throw Error(ErrorCode::InvalidParam,
                        std::string(kind_name(kind)) + " has no parameter '" + name + "'");
        }
        out[name] = coerce(*it, value, kind);
    }
    return out;
}

namespace detail {

double param_real(const Params& params, std::string_view name) {
    const auto it = params.find(name);
    if (it == params.end()) {
        throw Error(ErrorCode::InvalidParam, "missing parameter " + std::string(name));
    }
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
        return static_cast<double>(*i);
    }
    return std::get<double>(it->second);
}

std::int64_t param_int(const Params& params, std::string_view name) {
    const auto it = params.find(name);
    if (it == params.end()) {
        throw Error(ErrorCode::InvalidParam, "missing parameter " + std::string(name));
    }
    return std::get<std::int64_t>(it->second);
}

const std::string& param_str(const Params& params, std::string_view name) {
    const auto it = params.find(name);
    if (it == params.end()) {
        throw Error(ErrorCode::InvalidParam, "missing parameter " + std::string(name));
    }
    return std::get<std::string>(it->second);
}

}  // namespace detail

}  // namespace wfbt
