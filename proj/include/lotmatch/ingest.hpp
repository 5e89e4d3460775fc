#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lotmatch/types.hpp"

namespace lotmatch {

// Per-row parse outcomes. A missing or wrong header aborts the whole parse;
// malformed rows and invariant violations reject that row only.
struct RowIssue {
    enum class Kind { MalformedRow, InvariantViolation };
    Kind kind;
    long line;        // 1-based line number in the file
    std::string id;   // offending row id when known
    std::string message;
};

template <typename T>
struct ParseResult {
    std::vector<T> rows;
    std::vector<RowIssue> rejects;
};

// raw_type -> category mapping with canonical lower-case keys. Unrecognized
// types fall through to Excluded; the source data contains infrequent crime
// types that are deliberately filtered out.
class CrimeCategoryMap {
public:
    static CrimeCategoryMap defaults();
    static CrimeCategoryMap load(const std::filesystem::path& path);

    CrimeCategory categorize(std::string_view raw_type) const;

    void set(std::string_view raw_type, CrimeCategory cat);
    void write(const std::filesystem::path& path) const;

private:
    std::unordered_map<std::string, CrimeCategory> map_;
};

ParseResult<Lot> parse_lots(const std::filesystem::path& path);
ParseResult<CrimeEvent> parse_crimes(const std::filesystem::path& path, const CrimeCategoryMap& categories);
ParseResult<CensusBlock> parse_blocks(const std::filesystem::path& path);
ParseResult<BlockGroup> parse_blockgroups(const std::filesystem::path& path);
ParseResult<ZonedLot> parse_zoning(const std::filesystem::path& path);
ParseResult<Business> parse_businesses(const std::filesystem::path& path);

void write_lots(const std::filesystem::path& path, const std::vector<Lot>& rows);
void write_crimes(const std::filesystem::path& path, const std::vector<CrimeEvent>& rows);
void write_blocks(const std::filesystem::path& path, const std::vector<CensusBlock>& rows);
void write_blockgroups(const std::filesystem::path& path, const std::vector<BlockGroup>& rows);
void write_zoning(const std::filesystem::path& path, const std::vector<ZonedLot>& rows);
void write_businesses(const std::filesystem::path& path, const std::vector<Business>& rows);

}  // namespace lotmatch
