#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vl {

struct FileId {
    std::uint32_t value = 0;
    auto operator<=>(const FileId&) const = default;
};

// Byte range within one file plus the 1-based line/column of its start.
struct Span {
    FileId file;
    std::uint32_t byte_start = 0;
    std::uint32_t byte_end = 0;
    std::uint32_t line = 1;
    std::uint32_t column = 1;

    std::uint32_t length() const { return byte_end - byte_start; }
    bool operator==(const Span&) const = default;
};

// Owns the text of every file in a compilation. FileIds index into it.
class SourceManager {
public:
    FileId add(std::string path, std::string text);

    const std::string& path(FileId id) const { return files_.at(id.value).path; }
    const std::string& text(FileId id) const { return files_.at(id.value).text; }
    std::size_t size() const { return files_.size(); }

    // Text of the 1-based line without its terminator.
    std::string_view line_text(FileId id, std::uint32_t line) const;

    // Span covering [start, end) with line/column computed from the text.
    Span make_span(FileId id, std::uint32_t start, std::uint32_t end) const;

private:
    struct File {
        std::string path;
        std::string text;
        std::vector<std::uint32_t> line_starts;
    };
    std::vector<File> files_;
};

}  // namespace vl
