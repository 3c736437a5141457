#include "mlme/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlme::io {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("JSON parse error: ") + e.what());
    }
}

const json& field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) {
        throw InvalidInput(std::string("missing field \"") + name + "\"");
    }
    return *it;
}

template <typename T>
T field_as(const json& j, const char* name) {
    try {
        return field(j, name).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("field \"") + name + "\": " + e.what());
    }
}

json matrix_to_json(const ComplexMatrix& m) {
    json re = json::array();
    json im = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json re_row = json::array();
        json im_row = json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j) {
    const auto dim = field_as<Index>(j, "dim");
    if (dim < 1) {
        throw InvalidInput("field \"dim\" must be >= 1");
    }
    const json& re = field(j, "re");
    const json& im = field(j, "im");
    if (!re.is_array() || !im.is_array() || static_cast<Index>(re.size()) != dim
        || static_cast<Index>(im.size()) != dim) {
        throw InvalidInput("fields \"re\"/\"im\" must be dim x dim arrays");
    }
    ComplexMatrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        const json& re_row = re[static_cast<size_t>(i)];
        const json& im_row = im[static_cast<size_t>(i)];
        if (static_cast<Index>(re_row.size()) != dim
            || static_cast<Index>(im_row.size()) != dim) {
            std::ostringstream msg;
            msg << "row " << i << " of \"re\"/\"im\" has wrong length";
            throw InvalidInput(msg.str());
        }
        for (Index c = 0; c < dim; ++c) {
            try {
                m(i, c) = Complex(re_row[static_cast<size_t>(c)].get<double>(),
                                  im_row[static_cast<size_t>(c)].get<double>());
            } catch (const json::exception& e) {
                std::ostringstream msg;
                msg << "entry (" << i << "," << c << "): " << e.what();
                throw InvalidInput(msg.str());
            }
        }
    }
    return m;
}

std::string mode_name(HomodyneMode mode) {
    return mode == HomodyneMode::scaled_complement ? "scaled-complement" : "binned";
}

HomodyneMode mode_from_name(const std::string& name) {
    if (name == "scaled-complement") {
        return HomodyneMode::scaled_complement;
    }
    if (name == "binned") {
        return HomodyneMode::binned;
    }
    throw InvalidInput("unknown homodyne mode \"" + name + "\"");
}

json settings_to_json(const std::vector<QuadratureSetting>& settings) {
    json arr = json::array();
    for (const auto& s : settings) {
        arr.push_back(json{{"theta", s.theta}, {"xs", s.xs}});
    }
    return arr;
}

std::vector<QuadratureSetting> settings_from_json(const json& arr) {
    if (!arr.is_array() || arr.empty()) {
        throw InvalidInput("field \"settings\" must be a nonempty array");
    }
    std::vector<QuadratureSetting> settings;
    for (const auto& s : arr) {
        QuadratureSetting setting;
        setting.theta = field_as<double>(s, "theta");
        setting.xs = field_as<std::vector<double>>(s, "xs");
        settings.push_back(std::move(setting));
    }
    return settings;
}

}  // namespace

std::string to_json(const HermitianOperator& op) {
    return matrix_to_json(op.matrix()).dump();
}

HermitianOperator hermitian_from_json(const std::string& text) {
    return HermitianOperator(matrix_from_json(parse(text)));
}

std::string to_json(const Pom& pom) {
    json effects = json::array();
    for (const auto& e : pom.effects()) {
        effects.push_back(matrix_to_json(e.matrix()));
    }
    return json{{"dim", pom.dim()},
                {"effects", std::move(effects)},
                {"labels", pom.labels()}}
        .dump();
}

Pom pom_from_json(const std::string& text) {
    const json j = parse(text);
    const auto dim = field_as<Index>(j, "dim");
    const json& effects_json = field(j, "effects");
    if (!effects_json.is_array()) {
        throw InvalidInput("field \"effects\" must be an array");
    }
    std::vector<HermitianOperator> effects;
    for (const auto& e : effects_json) {
        effects.emplace_back(matrix_from_json(e));
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        labels = field_as<std::vector<std::string>>(j, "labels");
    }
    return Pom(dim, std::move(effects), std::move(labels));
}

std::string to_json(const HomodyneSpecFile& spec) {
    return json{{"settings", settings_to_json(spec.settings)},
                {"dim", spec.dim},
                {"mode", mode_name(spec.mode)}}
        .dump();
}

HomodyneSpecFile homodyne_spec_from_json(const std::string& text) {
    const json j = parse(text);
    HomodyneSpecFile spec;
    spec.settings = settings_from_json(field(j, "settings"));
    spec.dim = field_as<Index>(j, "dim");
    if (j.contains("mode")) {
        spec.mode = mode_from_name(field_as<std::string>(j, "mode"));
    }
    return spec;
}

bool looks_like_homodyne_spec(const std::string& text) {
    try {
        const json j = json::parse(text);
        return j.is_object() && j.contains("settings") && !j.contains("effects");
    } catch (const json::parse_error&) {
        return false;
    }
}

std::string to_json(const CountData& data) {
    std::vector<std::int64_t> counts;
    for (double c : data.counts()) {
        if (std::abs(c - std::llround(c)) > 1e-9) {
            throw InvalidInput("counts file schema requires integer counts; "
                               "this data holds idealized frequencies");
        }
        counts.push_back(static_cast<std::int64_t>(std::llround(c)));
    }
    return json{{"counts", std::move(counts)},
                {"total", static_cast<std::int64_t>(std::llround(data.total()))}}
        .dump();
}

CountData counts_from_json(const std::string& text) {
    const json j = parse(text);
    const auto counts = field_as<std::vector<std::int64_t>>(j, "counts");
    CountData data = CountData::from_counts(counts);
    if (j.contains("total")) {
        const auto total = field_as<std::int64_t>(j, "total");
        if (static_cast<double>(total) != data.total()) {
            std::ostringstream msg;
            msg << "field \"total\" = " << total << " does not match count sum "
                << data.total();
            throw InvalidInput(msg.str());
        }
    }
    return data;
}

std::string to_json(const ReconstructionResult& result, bool include_objective_trace) {
    json j{{"estimator", matrix_to_json(result.estimator.matrix())},
           {"iterations", result.iterations},
           {"residual", result.residual},
           {"converged", result.converged}};
    if (include_objective_trace) {
        j["objective_trace"] = result.objective_trace;
    }
    return j.dump();
}

ReconstructionResult reconstruction_from_json(const std::string& text) {
    const json j = parse(text);
    ReconstructionResult result;
    result.estimator = DensityMatrix(HermitianOperator(matrix_from_json(field(j, "estimator"))));
    result.iterations = field_as<int>(j, "iterations");
    result.residual = field_as<double>(j, "residual");
    result.converged = field_as<bool>(j, "converged");
    if (j.contains("objective_trace")) {
        result.objective_trace = field_as<std::vector<double>>(j, "objective_trace");
    }
    return result;
}

std::string to_json(const ExperimentConfig& config) {
    json pom_spec;
    if (config.pom_spec.kind == PomSpec::Kind::trine) {
        pom_spec = json{{"kind", "trine"}};
    } else {
        pom_spec = json{{"kind", "homodyne"},
                        {"settings", settings_to_json(config.pom_spec.settings.empty()
                                                          ? default_homodyne_settings()
                                                          : config.pom_spec.settings)},
                        {"mode", mode_name(config.pom_spec.mode)}};
    }
    json j{{"dim_true", config.dim_true},
           {"pom_spec", std::move(pom_spec)},
           {"copies", config.copies},
           {"trials", config.trials},
           {"seed", config.seed},
           {"lambda", config.lambda},
           {"recon_dims", config.recon_dims},
           {"lambdas", config.lambdas}};
    if (config.true_state) {
        j["true_state"] = matrix_to_json(config.true_state->matrix());
    }
    return j.dump();
}

ExperimentConfig experiment_from_json(const std::string& text) {
    const json j = parse(text);
    ExperimentConfig config;
    config.dim_true = field_as<Index>(j, "dim_true");
    config.copies = field_as<std::int64_t>(j, "copies");
    config.trials = field_as<int>(j, "trials");
    config.seed = field_as<std::uint64_t>(j, "seed");
    if (j.contains("lambda")) {
        config.lambda = field_as<double>(j, "lambda");
    }
    if (j.contains("recon_dims")) {
        config.recon_dims = field_as<std::vector<Index>>(j, "recon_dims");
    }
    if (j.contains("lambdas")) {
        config.lambdas = field_as<std::vector<double>>(j, "lambdas");
    }

    const json& spec = field(j, "pom_spec");
    const auto kind = field_as<std::string>(spec, "kind");
    if (kind == "trine") {
        config.pom_spec.kind = PomSpec::Kind::trine;
    } else if (kind == "homodyne") {
        config.pom_spec.kind = PomSpec::Kind::homodyne;
        if (spec.contains("settings")) {
            config.pom_spec.settings = settings_from_json(spec["settings"]);
        }
        if (spec.contains("mode")) {
            config.pom_spec.mode = mode_from_name(field_as<std::string>(spec, "mode"));
        }
    } else {
        throw InvalidInput("pom_spec.kind must be \"trine\" or \"homodyne\"");
    }

    if (j.contains("iteration")) {
        const json& it = j["iteration"];
        if (it.contains("epsilon")) config.iteration.epsilon = field_as<double>(it, "epsilon");
        if (it.contains("max_iters")) config.iteration.max_iters = field_as<int>(it, "max_iters");
        if (it.contains("residual_tol"))
            config.iteration.residual_tol = field_as<double>(it, "residual_tol");
        if (it.contains("objective_tol"))
            config.iteration.objective_tol = field_as<double>(it, "objective_tol");
        if (it.contains("log_floor"))
            config.iteration.log_floor = field_as<double>(it, "log_floor");
    }

    if (j.contains("true_state")) {
        config.true_state =
            DensityMatrix(HermitianOperator(matrix_from_json(j["true_state"])));
    }
    return config;
}

namespace {

std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    const bool dimension_sweep =
        !records.empty() && records.front().complete.has_value();
    out << "key,mean_entropy,mean_loglik,mean_trace_distance,mean_w00,trials";
    if (dimension_sweep) {
        out << ",complete,truncation_bias";
    }
    out << "\n";
    for (const auto& rec : records) {
        out << fmt12(rec.key) << ',' << fmt12(rec.mean_entropy) << ','
            << fmt12(rec.mean_loglik) << ',' << fmt12(rec.mean_trace_distance) << ','
            << fmt12(rec.mean_w00) << ',' << rec.trials;
        if (dimension_sweep) {
            out << ',' << (rec.complete.value_or(false) ? 1 : 0) << ','
                << fmt12(rec.truncation_bias.value_or(0.0));
        }
        out << "\n";
    }
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream os;
    write_sweep_csv(os, records);
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot open file: " + path);
    }
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidInput("cannot write file: " + path);
    }
    out << content;
}

}  // namespace mlme::io
