#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace lotmatch {

// Shortest round-trip decimal form (std::to_chars). Every double written to a
// CSV re-parses to the identical bit pattern.
std::string format_double(double v);

bool parse_double(std::string_view s, double& out);
bool parse_long(std::string_view s, long& out);

// Delimited text is comma-separated with no quoting; fields never contain
// commas in any of the shipped schemas.
void split_line(std::string_view line, std::vector<std::string_view>& out);

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Reads the whole file; strips a UTF-8 BOM and trailing '\r'. Throws
// Error(Data) when the file cannot be opened.
Csv read_csv(const std::filesystem::path& path);

std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to "<path>.tmp" and renames on commit, so partially written
// artifacts are never observed under the final name.
class AtomicWriter {
public:
    explicit AtomicWriter(std::filesystem::path path);
    ~AtomicWriter();

    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;

    void write(std::string_view text);
    void row(const std::vector<std::string>& fields);
    void row(std::initializer_list<std::string_view> fields);
    void commit();

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

}  // namespace lotmatch
