#include "freeprob/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace freeprob::report {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

void dump_rec(const Json& j, std::string& out, int depth) {
    const std::string pad(2 * std::size_t(depth), ' ');
    const std::string pad_in(2 * std::size_t(depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + Json(k).dump() + ": ";
                dump_rec(v, out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(v, out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x))
                out += Json(format_double(x)).dump();
            else
                out += format_double(x);
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

std::string csv_cell(const Json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string esc = "\"";
        for (char c : s) {
            if (c == '"') esc += '"';
            esc += c;
        }
        return esc + "\"";
    }
    return v.dump();
}

void csv_flat(const Json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            csv_flat(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            csv_flat(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out += prefix + "," + csv_cell(j) + "\n";
    }
}

}  // namespace

std::string dump(const Json& j) {
    std::string out;
    dump_rec(j, out, 0);
    out += "\n";
    return out;
}

std::string to_csv(const Json& j) {
    if (j.is_object() && j.contains("rows") && j["rows"].is_array() &&
        !j["rows"].empty() && j["rows"][0].is_object()) {
        const Json& rows = j["rows"];
        std::string out;
        bool first = true;
        for (const auto& [k, v] : rows[0].items()) {
            (void)v;
            if (!first) out += ",";
            first = false;
            out += k;
        }
        out += "\n";
        for (const auto& row : rows) {
            first = true;
            for (const auto& [k, v] : row.items()) {
                (void)k;
                if (!first) out += ",";
                first = false;
                out += csv_cell(v);
            }
            out += "\n";
        }
        return out;
    }
    std::string out = "key,value\n";
    csv_flat(j, "", out);
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move report into place at " + path);
    }
}

void write_report(const std::string& path, const Json& j,
                  const std::string& format) {
    if (format == "csv")
        write_text(path, to_csv(j));
    else if (format == "json")
        write_text(path, dump(j));
    else
        throw std::invalid_argument("unknown report format: " + format);
}

}  // namespace freeprob::report
