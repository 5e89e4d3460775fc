#include "lotmatch/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

#include "lotmatch/error.hpp"

namespace lotmatch {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s == "nan") {
        out = std::nan("");
        return true;
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_long(std::string_view s, long& out) {
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

void split_line(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
                static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
                line.erase(0, 3);
            first = false;
        }
        lines.push_back(line);
    }
    return lines;
}

Csv read_csv(const std::filesystem::path& path) {
    Csv csv;
    auto lines = read_lines(path);
    if (lines.empty()) throw data_error("empty csv: " + path.string());
    std::vector<std::string_view> fields;
    split_line(lines[0], fields);
    for (auto f : fields) csv.header.emplace_back(f);
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        split_line(lines[i], fields);
        std::vector<std::string> row;
        row.reserve(fields.size());
        for (auto f : fields) row.emplace_back(f);
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

AtomicWriter::AtomicWriter(std::filesystem::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::binary) {
    if (!out_) throw data_error("cannot open for write: " + tmp_.string());
}

AtomicWriter::~AtomicWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void AtomicWriter::write(std::string_view text) { out_.write(text.data(), static_cast<std::streamsize>(text.size())); }

void AtomicWriter::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_.put(',');
        out_.write(fields[i].data(), static_cast<std::streamsize>(fields[i].size()));
    }
    out_.put('\n');
}

void AtomicWriter::row(std::initializer_list<std::string_view> fields) {
    size_t i = 0;
    for (auto f : fields) {
        if (i++) out_.put(',');
        out_.write(f.data(), static_cast<std::streamsize>(f.size()));
    }
    out_.put('\n');
}

void AtomicWriter::commit() {
    out_.flush();
    if (!out_) throw data_error("write failed: " + tmp_.string());
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
}

}  // namespace lotmatch
