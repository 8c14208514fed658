#include "vl/source.hpp"

#include <algorithm>

namespace vl {

FileId SourceManager::add(std::string path, std::string text) {
    File file{std::move(path), std::move(text), {0}};
    for (std::uint32_t i = 0; i < file.text.size(); ++i) {
        if (file.text[i] == '\n')
            file.line_starts.push_back(i + 1);
    }
    files_.push_back(std::move(file));
    return FileId{static_cast<std::uint32_t>(files_.size() - 1)};
}

std::string_view SourceManager::line_text(FileId id, std::uint32_t line) const {
    const File& file = files_.at(id.value);
    if (line == 0 || line > file.line_starts.size())
        return {};
    std::uint32_t begin = file.line_starts[line - 1];
    std::uint32_t end = line < file.line_starts.size() ? file.line_starts[line]
                                                      : static_cast<std::uint32_t>(file.text.size());
    std::string_view view(file.text);
    view = view.substr(begin, end - begin);
    while (!view.empty() && (view.back() == '\n' || view.back() == '\r'))
        view.remove_suffix(1);
    return view;
}

Span SourceManager::make_span(FileId id, std::uint32_t start, std::uint32_t end) const {
    const File& file = files_.at(id.value);
    auto it = std::upper_bound(file.line_starts.begin(), file.line_starts.end(), start);
    auto line = static_cast<std::uint32_t>(it - file.line_starts.begin());
    std::uint32_t column = start - file.line_starts[line - 1] + 1;
    return Span{id, start, end, line, column};
}

}  // namespace vl
