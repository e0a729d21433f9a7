#include "onlinefwer/stream_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <istream>

#include "json.hpp"

namespace ofwer {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Comma split with double-quoted fields ("" escapes a quote).
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

double checked_p(std::optional<double> v, const std::string& raw, std::size_t line) {
    if (!v) throw InputError(line, "p-value '" + raw + "' is not a number");
    if (!(*v >= 0.0 && *v <= 1.0)) throw InputError(line, "p-value " + raw + " is outside [0,1]");
    return *v;
}

bool parse_label(const std::string& raw, std::size_t line) {
    const std::string s = lower(trim(raw));
    if (s == "1" || s == "true" || s == "non-null" || s == "nonnull" || s == "alt" || s == "alternative")
        return true;
    if (s == "0" || s == "false" || s == "null") return false;
    throw InputError(line, "label '" + raw + "' is not one of 0/1, true/false, null/non-null");
}

}  // namespace

StreamFormat format_for_path(const std::string& path) {
    const std::string l = lower(path);
    auto ends = [&](const std::string& suffix) {
        return l.size() >= suffix.size() && l.compare(l.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return ends(".jsonl") || ends(".ndjson") ? StreamFormat::jsonl : StreamFormat::csv;
}

StreamReader::StreamReader(std::istream& in, StreamFormat format) : in_(in), format_(format) {}

bool StreamReader::read_header() {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (line_ == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) raw.erase(0, 3);
        if (blank(raw)) continue;
        const auto cols = split_csv(raw);
        n_cols_ = cols.size();
        std::optional<std::size_t> p_col;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const std::string name = lower(cols[i]);
            if (name == "p" || name == "p_value" || name == "pvalue") {
                p_col = i;
            } else if (name == "batch_id" || name == "batch") {
                batch_col_ = i;
            } else if (name == "label") {
                label_col_ = i;
            } else {
                throw InputError(line_, "unknown column '" + cols[i] + "' (expected p, batch_id, label)");
            }
        }
        if (!p_col) throw InputError(line_, "header has no 'p' column");
        p_col_ = *p_col;
        return true;
    }
    return false;
}

StreamRecord StreamReader::parse_csv(const std::string& raw) {
    const auto fields = split_csv(raw);
    if (fields.size() != n_cols_)
        throw InputError(line_, "expected " + std::to_string(n_cols_) + " fields, found " +
                                    std::to_string(fields.size()));
    StreamRecord r;
    r.line = line_;
    r.p = checked_p(parse_number(fields[p_col_]), fields[p_col_], line_);
    if (batch_col_) {
        if (fields[*batch_col_].empty()) throw InputError(line_, "empty batch_id");
        r.batch_id = fields[*batch_col_];
    }
    if (label_col_) r.non_null = parse_label(fields[*label_col_], line_);
    return r;
}

StreamRecord StreamReader::parse_jsonl(const std::string& raw) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        throw InputError(line_, "not a JSON object");
    }
    if (!j.is_object()) throw InputError(line_, "not a JSON object");
    StreamRecord r;
    r.line = line_;
    for (const auto& [key, value] : j.items()) {
        if (key == "p") {
            if (!value.is_number()) throw InputError(line_, "'p' is not a number");
            r.p = checked_p(value.get<double>(), value.dump(), line_);
        } else if (key == "batch_id") {
            if (value.is_string())
                r.batch_id = value.get<std::string>();
            else if (value.is_number_integer())
                r.batch_id = value.dump();
            else
                throw InputError(line_, "'batch_id' must be a string or integer");
            saw_batch_ = true;
        } else if (key == "label") {
            if (value.is_boolean())
                r.non_null = value.get<bool>();
            else if (value.is_number_integer() || value.is_string())
                r.non_null = parse_label(value.is_string() ? value.get<std::string>() : value.dump(), line_);
            else
                throw InputError(line_, "'label' has an unsupported type");
        } else {
            throw InputError(line_, "unknown key '" + key + "'");
        }
    }
    if (!j.contains("p")) throw InputError(line_, "record has no 'p'");
    return r;
}

std::optional<StreamRecord> StreamReader::next() {
    if (format_ == StreamFormat::csv && !header_done_) {
        header_done_ = true;
        if (!read_header()) return std::nullopt;
    }
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (blank(raw)) continue;
        return format_ == StreamFormat::csv ? parse_csv(raw) : parse_jsonl(raw);
    }
    return std::nullopt;
}

std::vector<StreamRecord> read_stream(std::istream& in, StreamFormat format) {
    StreamReader reader(in, format);
    std::vector<StreamRecord> out;
    while (auto r = reader.next()) out.push_back(std::move(*r));
    return out;
}

}  // namespace ofwer
