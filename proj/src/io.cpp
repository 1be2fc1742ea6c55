#include "lde/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lde/errors.hpp"

namespace lde::io {

namespace {

double parse_plain(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InputError("cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        parts.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

Vector vector_from_json(const json& doc, const std::string& key) {
    if (!doc.contains(key) || !doc.at(key).is_array()) throw InputError("missing array '" + key + "'");
    const auto& arr = doc.at(key);
    Vector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = parse_scalar(arr[i]);
    return v;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace

double parse_scalar(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_plain(text);
    const double p = parse_plain(text.substr(0, slash));
    const double q = parse_plain(text.substr(slash + 1));
    if (q == 0.0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return p / q;
}

double parse_scalar(const json& value) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) return parse_scalar(std::string_view(value.get_ref<const std::string&>()));
    throw InputError("expected a number or a \"p/q\" string, got " + value.dump());
}

Matrix matrix_from_json(const json& doc, const std::string& key) {
    if (!doc.is_object() || !doc.contains(key)) throw InputError("missing matrix '" + key + "'");
    const auto& rows = doc.at(key);
    if (!rows.is_array() || rows.empty()) throw InputError("matrix '" + key + "' must be a non-empty array");
    const auto n = static_cast<Index>(rows.size());
    if (doc.contains("n") && doc.at("n").get<Index>() != n) {
        throw InputError("declared n does not match the row count of '" + key + "'");
    }
    Matrix M(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n) {
            throw InputError("matrix '" + key + "' must be square");
        }
        for (Index j = 0; j < n; ++j) M(i, j) = parse_scalar(row[static_cast<std::size_t>(j)]);
    }
    if (!M.allFinite()) throw InputError("matrix '" + key + "' has non-finite entries");
    return M;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

LinearSystem system_from_json(const json& doc) { return LinearSystem(matrix_from_json(doc, "A")); }

json system_to_json(const LinearSystem& sys) {
    return json{{"n", sys.dim()}, {"A", matrix_to_json(sys.matrix())}};
}

Matrix adjacency_from_json(const json& doc) { return matrix_from_json(doc, "W"); }

json adjacency_to_json(const Matrix& W, const std::vector<Index>& blocks) {
    json doc{{"n", W.rows()}, {"W", matrix_to_json(W)}};
    if (!blocks.empty()) doc["blocks"] = blocks;
    return doc;
}

bool is_coupled_document(const json& doc) {
    return doc.is_object() && doc.value("kind", std::string{}) == "coupled_cell";
}

CoupledCellSystem coupled_from_json(const json& doc) {
    if (!is_coupled_document(doc)) throw InputError("not a coupled_cell document");
    CoupledCellSystem sys;
    sys.alpha = vector_from_json(doc, "alpha");
    sys.beta = vector_from_json(doc, "beta");
    sys.gamma = vector_from_json(doc, "gamma");
    sys.coupling = matrix_from_json(json{{"S", doc.at("S")}}, "S");
    sys.epsilon = parse_scalar(doc.at("epsilon"));
    if (doc.contains("d") && doc.at("d").get<Index>() != sys.cells()) {
        throw InputError("declared d does not match the parameter arrays");
    }
    sys.validate();
    return sys;
}

json coupled_to_json(const CoupledCellSystem& sys) {
    return json{{"kind", "coupled_cell"},
                {"d", sys.cells()},
                {"alpha", vector_to_json(sys.alpha)},
                {"beta", vector_to_json(sys.beta)},
                {"gamma", vector_to_json(sys.gamma)},
                {"S", matrix_to_json(sys.coupling)},
                {"epsilon", sys.epsilon}};
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    if (ec != std::errc()) throw NumericError("cannot format double");
    return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << 'k';
    for (Index j = 0; j < traj.dim(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (Index k = 0; k < traj.states.rows(); ++k) {
        out << k;
        for (Index j = 0; j < traj.dim(); ++j) out << ',' << format_double(traj.states(k, j));
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty trajectory file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    if (header.size() < 2 || header[0] != "k") throw InputError("trajectory header must be k,x1,...,xn");
    const auto n = static_cast<Index>(header.size() - 1);
    for (Index j = 0; j < n; ++j) {
        if (header[static_cast<std::size_t>(j + 1)] != "x" + std::to_string(j + 1)) {
            throw InputError("trajectory header must be k,x1,...,xn");
        }
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (static_cast<Index>(fields.size()) != n + 1) {
            throw InputError("trajectory row " + std::to_string(rows.size()) + " has the wrong column count");
        }
        if (parse_plain(fields[0]) != static_cast<double>(rows.size())) {
            throw InputError("trajectory steps must be consecutive from 0");
        }
        std::vector<double> row;
        for (Index j = 0; j < n; ++j) row.push_back(parse_plain(fields[static_cast<std::size_t>(j + 1)]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("trajectory has no rows");
    Trajectory traj{Matrix(static_cast<Index>(rows.size()), n)};
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (Index j = 0; j < n; ++j) traj.states(static_cast<Index>(k), j) = rows[k][static_cast<std::size_t>(j)];
    }
    return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_trajectory_csv(in);
}

json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json complex_list_to_json(const ComplexVector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

json report_to_json(const LocalizabilityReport& report) {
    return json{{"vertex", report.vertex + 1},
                {"singular_values", report.singular_values},
                {"numeric_rank", report.numeric_rank},
                {"localizable", report.localizable},
                {"tolerance", report.tolerance_used}};
}

json companion_to_json(const CompanionModel& model) {
    return json{{"s", model.delays},
                {"w", vector_to_json(model.weights)},
                {"residual", model.residual},
                {"scale", model.scale}};
}

CompanionModel companion_from_json(const json& doc) {
    CompanionModel model;
    model.delays = doc.at("s").get<Index>();
    model.weights = vector_from_json(doc, "w");
    if (model.weights.size() != model.delays) throw InputError("companion weights must have length s");
    model.residual = doc.value("residual", 0.0);
    model.scale = doc.value("scale", 1.0);
    return model;
}

json spectral_report_to_json(const SpectralReport& report) {
    json doc{{"vertex", report.vertex + 1},
             {"model", companion_to_json(report.model)},
             {"eigenvalues", complex_list_to_json(report.eigenvalues)},
             {"trace_estimate", report.trace_estimate},
             {"det_estimate", report.det_estimate}};
    if (report.components.size() > 0) doc["components"] = complex_list_to_json(report.components);
    doc["bipartite"] = report.bipartite ? json(*report.bipartite) : json(nullptr);
    doc["cluster_count"] = report.cluster_count ? json(*report.cluster_count) : json(nullptr);
    return doc;
}

json labels_to_json(const std::vector<Index>& labels) {
    json arr = json::array();
    for (std::size_t v = 0; v < labels.size(); ++v) {
        arr.push_back(json{{"vertex", static_cast<Index>(v) + 1}, {"cluster", labels[v]}});
    }
    return arr;
}

}  // namespace lde::io
