#include "rlab/cli/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rlab/common/errors.hpp"

namespace rlab::cli {

namespace {

void escape(const std::string& s, std::string& out) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void emit(const json& j, int depth, std::string& out) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                escape(it.key(), out);
                out += ": ";
                emit(it.value(), depth + 1, out);
            }
            out += "\n" + close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            // Short arrays of scalars stay on one line.
            bool flat = j.size() <= 4;
            for (const auto& v : j) flat = flat && !v.is_structured();
            out += flat ? "[" : "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += flat ? ", " : ",\n";
                if (!flat) out += pad;
                emit(j[i], depth + 1, out);
            }
            out += flat ? "]" : "\n" + close + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v)) out += format_double(v);
            else escape(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"), out);
            return;
        }
        case json::value_t::string: escape(j.get<std::string>(), out); return;
        default: out += j.dump(); return;
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot write " + path);
    return f;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // Keep the value recognisably floating point.
    if (std::isfinite(v) && s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string dump_json(const json& j) {
    std::string out;
    emit(j, 0, out);
    out += '\n';
    return out;
}

std::string config_hash(const json& resolved) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump_json(resolved)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

void CsvTable::add(std::vector<std::string> row) {
    require(row.size() == columns.size(), "table row has the wrong number of fields");
    rows.push_back(std::move(row));
}

void write_text(const std::string& path, const std::string& text) {
    auto f = open_out(path);
    f << text;
}

void write_csv(const std::string& path, const CsvTable& t, const std::string& hash) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) f << (i ? "," : "") << csv_field(t.columns[i]);
    f << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << csv_field(r[i]);
        f << '\n';
    }
}

void write_plot_table(const std::string& path, const CsvTable& t, const std::string& hash) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n#";
    for (const auto& c : t.columns) f << ' ' << c;
    f << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::string v = r[i];
            for (char& c : v)
                if (c == ' ') c = '_';
            f << (i ? " " : "") << v;
        }
        f << '\n';
    }
}

}  // namespace rlab::cli
