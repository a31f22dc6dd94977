#include "compos/io.hpp"

#include "compos/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace compos {

std::string CovariateSpec::display_name() const {
    return transform == Transform::log ? "log(" + column + ")" : column;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == sep && !quoted) {
            out.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(trim(field));
    return out;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') {
        ++begin;
    }
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        return std::nullopt;
    }
    return v;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorKind::config, "column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - header.begin());
}

} // namespace

CompositionalDataset parse_csv(std::istream& in, const RunConfig& config) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split(line, ',');
            break;
        }
    }
    if (header.empty()) {
        throw DataError(std::max<std::size_t>(line_no, 1), "input is empty (no header row)");
    }

    std::vector<std::size_t> cov_idx;
    for (const auto& spec : config.covariates) {
        cov_idx.push_back(find_column(header, spec.column));
    }
    std::vector<std::string> part_cols = config.parts;
    if (part_cols.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (std::find(cov_idx.begin(), cov_idx.end(), j) == cov_idx.end()) {
                part_cols.push_back(header[j]);
            }
        }
    }
    if (part_cols.size() < 2) {
        throw Error(ErrorKind::config, "at least two part columns are required");
    }
    std::vector<std::size_t> part_idx;
    for (const auto& name : part_cols) {
        part_idx.push_back(find_column(header, name));
    }

    std::vector<MeasurementRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw DataError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
        }
        Vector raw(static_cast<Eigen::Index>(part_idx.size()));
        for (std::size_t k = 0; k < part_idx.size(); ++k) {
            const auto v = parse_number(fields[part_idx[k]]);
            if (!v || !std::isfinite(*v)) {
                throw DataError(line_no, "part '" + part_cols[k] + "' is not a number");
            }
            if (*v < 0.0) {
                throw DataError(line_no, "part '" + part_cols[k] + "' is negative");
            }
            raw[static_cast<Eigen::Index>(k)] = *v;
        }
        if (!(raw.sum() > 0.0)) {
            throw DataError(line_no, "total of part values is zero");
        }
        Vector covs(static_cast<Eigen::Index>(cov_idx.size()));
        for (std::size_t r = 0; r < cov_idx.size(); ++r) {
            const auto& spec = config.covariates[r];
            const auto v = parse_number(fields[cov_idx[r]]);
            if (!v || !std::isfinite(*v)) {
                throw DataError(line_no, "covariate '" + spec.column + "' is not a number");
            }
            double value = *v;
            if (spec.transform == Transform::log) {
                if (!(value > 0.0)) {
                    throw DataError(line_no, "covariate '" + spec.column + "' must be positive for log transform");
                }
                value = std::log(value);
            }
            covs[static_cast<Eigen::Index>(r)] = value;
        }
        records.push_back(MeasurementRecord::from_raw(std::move(raw), std::move(covs)));
    }
    if (records.empty()) {
        throw DataError(line_no, "input has a header but no data rows");
    }
    std::vector<std::string> cov_names;
    for (const auto& spec : config.covariates) {
        cov_names.push_back(spec.display_name());
    }
    return CompositionalDataset(std::move(records), std::move(part_cols), std::move(cov_names));
}

CompositionalDataset parse_csv(const std::string& path, const RunConfig& config) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::config, "cannot open input file '" + path + "'");
    }
    return parse_csv(in, config);
}

IdentificationConstraint resolve_constraint(const std::string& spec, const std::vector<std::string>& part_names) {
    if (spec == "sum") {
        return IdentificationConstraint::sum_to_zero();
    }
    if (spec.rfind("ref:", 0) == 0) {
        const std::string target = spec.substr(4);
        const auto it = std::find(part_names.begin(), part_names.end(), target);
        if (it != part_names.end()) {
            return IdentificationConstraint::reference_part(it - part_names.begin());
        }
        const auto idx = parse_number(target);
        if (idx && *idx >= 1 && *idx <= static_cast<double>(part_names.size()) && std::floor(*idx) == *idx) {
            return IdentificationConstraint::reference_part(static_cast<Eigen::Index>(*idx) - 1);
        }
        throw Error(ErrorKind::config, "unknown reference part '" + target + "'");
    }
    throw Error(ErrorKind::config, "constraint must be 'sum' or 'ref:<part>'");
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "NaN";
    }
    if (std::isinf(v)) {
        return v > 0 ? "Inf" : "-Inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_dataset_csv(std::ostream& out, const CompositionalDataset& data) {
    bool first = true;
    auto sep = [&]() -> std::ostream& {
        if (!first) {
            out << ',';
        }
        first = false;
        return out;
    };
    for (const auto& name : data.part_names()) {
        sep() << name;
    }
    for (const auto& name : data.covariate_names()) {
        sep() << name;
    }
    out << '\n';
    for (const auto& rec : data.records()) {
        first = true;
        for (Eigen::Index k = 0; k < rec.raw.size(); ++k) {
            sep() << format_double(rec.raw[k]);
        }
        for (Eigen::Index r = 0; r < rec.covariates.size(); ++r) {
            sep() << format_double(rec.covariates[r]);
        }
        out << '\n';
    }
}

void write_coefficient_table(std::ostream& out, const CompositionalDataset& data, const FitResult& fit,
                             const CoefficientCovariance& model, const CoefficientCovariance& sandwich) {
    out << "part,covariate,estimate,se_model,se_sandwich,z_model\n";
    const Matrix& B = fit.coefficients.B;
    for (Eigen::Index k = 0; k < B.rows(); ++k) {
        for (Eigen::Index r = 0; r < B.cols(); ++r) {
            const double se = model.standard_error(k, r);
            const std::string cov = r == 0 ? "(intercept)" : data.covariate_names()[static_cast<std::size_t>(r - 1)];
            out << data.part_names()[static_cast<std::size_t>(k)] << ',' << cov << ',' << format_double(B(k, r))
                << ',' << format_double(se) << ',' << format_double(sandwich.standard_error(k, r)) << ','
                << format_double(se > 0.0 ? B(k, r) / se : std::nan("")) << '\n';
        }
    }
}

void write_labeled_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& labels,
                          const std::string& corner) {
    out << corner;
    for (const auto& l : labels) {
        out << ',' << l;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << ',' << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_rows(std::ostream& out, const Matrix& rows, const std::vector<std::string>& columns,
                const std::string& index_name) {
    out << index_name;
    for (const auto& c : columns) {
        out << ',' << c;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        out << (i + 1);
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            out << ',' << format_double(rows(i, j));
        }
        out << '\n';
    }
}

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw Error(ErrorKind::config, "scenario key '" + key + "': " + why);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ',')) {
        const auto v = parse_number(item);
        if (!v) {
            bad_key(key, "'" + item + "' is not a number");
        }
        out.push_back(*v);
    }
    return out;
}

Matrix parse_rows(const std::string& key, const std::string& value) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : split(value, ';')) {
        rows.push_back(parse_list(key, row));
    }
    if (rows.empty() || rows.front().empty()) {
        bad_key(key, "empty matrix");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) {
            bad_key(key, "rows have different lengths");
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

/// "name(a,b)" -> (name, [a, b])
std::pair<std::string, std::vector<double>> parse_call(const std::string& key, const std::string& value) {
    const auto open = value.find('(');
    if (open == std::string::npos) {
        return {trim(value), {}};
    }
    if (value.back() != ')') {
        bad_key(key, "missing ')'");
    }
    return {trim(value.substr(0, open)), parse_list(key, value.substr(open + 1, value.size() - open - 2))};
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        bad_key(key, "'" + value + "' is not an integer");
    }
    return v;
}

} // namespace

SimulationScenario parse_scenario(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::config, "scenario line without '=': " + trim(line));
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    static const std::vector<std::string> known = {"N",     "D",          "p",      "seed", "replicates",
                                                   "true_B", "covariates", "errors", "sigma", "sigma_diag",
                                                   "shapes", "base",       "zero_prob", "tau"};
    for (const auto& [key, value] : kv) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            bad_key(key, "unknown key");
        }
    }
    auto require = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            bad_key(key, "missing");
        }
        return it->second;
    };

    SimulationScenario sc;
    sc.N = parse_int("N", require("N"));
    sc.D = parse_int("D", require("D"));
    sc.p = parse_int("p", require("p"));
    if (kv.count("seed")) {
        const auto& s = kv["seed"];
        std::uint64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            bad_key("seed", "'" + s + "' is not an unsigned 64-bit integer");
        }
        sc.seed = v;
    }
    if (kv.count("replicates")) {
        sc.replicates = static_cast<int>(parse_int("replicates", kv["replicates"]));
    }
    sc.true_B = parse_rows("true_B", require("true_B"));
    if (sc.true_B.rows() != sc.D || sc.true_B.cols() != sc.p + 1) {
        bad_key("true_B", "must have D rows of p+1 values");
    }

    if (kv.count("covariates")) {
        const auto [name, args] = parse_call("covariates", kv["covariates"]);
        if (args.size() != 2) {
            bad_key("covariates", "expected two parameters");
        }
        if (name == "normal") {
            sc.covariates = {CovariateLaw::Kind::normal, args[0], args[1]};
        } else if (name == "uniform") {
            sc.covariates = {CovariateLaw::Kind::uniform, args[0], args[1]};
        } else {
            bad_key("covariates", "unknown law '" + name + "'");
        }
    }

    if (kv.count("tau")) {
        const auto [name, args] = parse_call("tau", kv["tau"]);
        if (name == "constant" && args.size() == 1) {
            sc.tau = {TauLaw::Kind::constant, args[0], 0.0};
        } else if (name == "lognormal" && args.size() == 2) {
            sc.tau = {TauLaw::Kind::lognormal, args[0], args[1]};
        } else if (name == "uniform" && args.size() == 2) {
            sc.tau = {TauLaw::Kind::uniform, args[0], args[1]};
        } else {
            bad_key("tau", "expected constant(v), lognormal(mu,sd) or uniform(lo,hi)");
        }
    }

    auto lognormal = [&]() {
        if (kv.count("sigma")) {
            return LognormalLaw{parse_rows("sigma", kv["sigma"])};
        }
        if (kv.count("sigma_diag")) {
            const auto d = parse_list("sigma_diag", kv["sigma_diag"]);
            return LognormalLaw{Vector::Map(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal()};
        }
        bad_key("sigma", "lognormal errors need sigma or sigma_diag");
    };
    auto gamma = [&]() {
        const auto s = parse_list("shapes", require("shapes"));
        return GammaLaw{Vector::Map(s.data(), static_cast<Eigen::Index>(s.size()))};
    };

    const std::string errors = kv.count("errors") ? kv["errors"] : "lognormal";
    if (errors == "lognormal") {
        sc.errors = lognormal();
    } else if (errors == "gamma") {
        sc.errors = gamma();
    } else if (errors == "zero_inflated") {
        ZeroInflatedLaw z;
        const std::string base = kv.count("base") ? kv["base"] : "lognormal";
        if (base == "lognormal") {
            z.base = lognormal();
        } else if (base == "gamma") {
            z.base = gamma();
        } else {
            bad_key("base", "expected lognormal or gamma");
        }
        const auto q = parse_number(require("zero_prob"));
        if (!q) {
            bad_key("zero_prob", "not a number");
        }
        z.zero_prob = *q;
        sc.errors = z;
    } else {
        bad_key("errors", "expected lognormal, gamma or zero_inflated");
    }

    try {
        validate_scenario(sc);
    } catch (const Error& e) {
        throw Error(ErrorKind::config, std::string("scenario: ") + e.what());
    }
    return sc;
}

SimulationScenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::config, "cannot open scenario file '" + path + "'");
    }
    return parse_scenario(in);
}

namespace {

std::vector<std::string> coefficient_labels(Eigen::Index D, Eigen::Index p) {
    std::vector<std::string> out;
    for (Eigen::Index k = 0; k < D; ++k) {
        for (Eigen::Index r = 0; r <= p; ++r) {
            out.push_back("part" + std::to_string(k + 1) + "_" + (r == 0 ? std::string("intercept") : "x" + std::to_string(r)));
        }
    }
    return out;
}

} // namespace

void write_study_csv(std::ostream& out, const SimulationScenario& sc, const std::vector<ReplicateResult>& results) {
    const auto labels = coefficient_labels(sc.D, sc.p);
    out << "replicate,converged,iterations,resampled_rows";
    for (const char* prefix : {"est_", "se_model_", "se_sandwich_", "cover_"}) {
        for (const auto& l : labels) {
            out << ',' << prefix << l;
        }
    }
    out << '\n';
    const auto m = static_cast<Eigen::Index>(labels.size());
    for (const auto& r : results) {
        out << r.replicate << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.resampled_rows;
        const bool ok = r.error.empty();
        for (const Vector* v : {&r.estimate, &r.se_model, &r.se_sandwich}) {
            for (Eigen::Index j = 0; j < m; ++j) {
                out << ',' << (ok ? format_double((*v)[j]) : "NaN");
            }
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            out << ',' << (ok ? (r.covered[static_cast<std::size_t>(j)] ? "1" : "0") : "NaN");
        }
        out << '\n';
    }
}

void write_study_summary(std::ostream& out, const SimulationScenario& sc, const StudySummary& s) {
    const auto labels = coefficient_labels(sc.D, sc.p);
    out << "coefficient,truth,mc_mean,mc_se,bias,coverage\n";
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        out << labels[j] << ',' << format_double(s.truth[i]) << ',' << format_double(s.mean[i]) << ','
            << format_double(s.mc_se[i]) << ',' << format_double(s.bias[i]) << ',' << format_double(s.coverage[i])
            << '\n';
    }
    out << "# replicates=" << sc.replicates << " failures=" << s.failures << '\n';
}

} // namespace compos
