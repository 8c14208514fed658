#include "vl/docgen.hpp"

#include <algorithm>
#include <cctype>

#include "vl/emitter.hpp"
#include "vl/formatter.hpp"

namespace vl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return lines;
}

// Opening fence: up to three spaces, then ``` and an info string.
std::optional<std::string_view> fence_info(std::string_view line) {
    std::size_t indent = 0;
    while (indent < line.size() && indent < 3 && line[indent] == ' ')
        ++indent;
    line.remove_prefix(indent);
    if (line.substr(0, 3) != "```")
        return std::nullopt;
    return trim(line.substr(3));
}

std::string one_line(std::string_view doc) {
    std::string out;
    for (std::string_view line : split_lines(doc)) {
        auto t = trim(line);
        if (t.empty())
            continue;
        if (!out.empty())
            out += ' ';
        out += t;
    }
    return out;
}

std::string port_type(const TypeSpec& type) {
    if (is_clock_kind(type.kind) || is_reset_kind(type.kind))
        return to_keyword(type.kind);
    return lower_type(type) + lower_unpacked(type);
}

// ---------------------------------------------------------------------------
// Relaxed JSON

class RelaxedJson {
public:
    explicit RelaxedJson(std::string_view text) : s_(text) {}

    bool valid() {
        ws();
        if (!value())
            return false;
        ws();
        return i_ == s_.size();
    }

private:
    void ws() {
        while (i_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
                ++i_;
            }
            else if (s_.substr(i_, 2) == "//") {
                while (i_ < s_.size() && s_[i_] != '\n')
                    ++i_;
            }
            else {
                break;
            }
        }
    }

    bool string() {
        char quote = s_[i_++];
        while (i_ < s_.size()) {
            char c = s_[i_++];
            if (c == '\\') {
                if (i_ >= s_.size())
                    return false;
                ++i_;
            }
            else if (c == quote) {
                return true;
            }
            else if (c == '\n') {
                return false;
            }
        }
        return false;
    }

    bool word() {
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
                                  s_[i_] == '$' || s_[i_] == '.' || s_[i_] == '-' || s_[i_] == '+'))
            ++i_;
        return i_ > start;
    }

    bool number_or_literal() {
        std::size_t start = i_;
        if (!word())
            return false;
        std::string_view w = s_.substr(start, i_ - start);
        if (w == "true" || w == "false" || w == "null")
            return true;
        char* end = nullptr;
        std::string copy(w);
        std::strtod(copy.c_str(), &end);
        return end && *end == '\0';
    }

    bool key() {
        if (i_ >= s_.size())
            return false;
        if (s_[i_] == '"' || s_[i_] == '\'')
            return string();
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '$'))
            ++i_;
        return i_ > start;
    }

    template <class F>
    bool list(char close, F&& element) {
        ++i_;
        ws();
        while (i_ < s_.size() && s_[i_] != close) {
            if (!element())
                return false;
            ws();
            if (i_ < s_.size() && s_[i_] == ',') {
                ++i_;
                ws();
                continue;
            }
            break;
        }
        if (i_ >= s_.size() || s_[i_] != close)
            return false;
        ++i_;
        return true;
    }

    bool value() {
        if (++depth_ > 256)
            return false;
        bool ok = false;
        if (i_ >= s_.size())
            ok = false;
        else if (s_[i_] == '{')
            ok = list('}', [&] {
                if (!key())
                    return false;
                ws();
                if (i_ >= s_.size() || s_[i_] != ':')
                    return false;
                ++i_;
                ws();
                return value();
            });
        else if (s_[i_] == '[')
            ok = list(']', [&] { return value(); });
        else if (s_[i_] == '"' || s_[i_] == '\'')
            ok = string();
        else
            ok = number_or_literal();
        --depth_;
        return ok;
    }

    std::string_view s_;
    std::size_t i_ = 0;
    int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Inline markdown

std::string inline_html(std::string_view text) {
    std::string out;
    std::size_t i = 0;
    auto find_close = [&](std::string_view marker, std::size_t from) {
        std::size_t at = text.find(marker, from);
        return at;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\\' && i + 1 < text.size() && std::ispunct(static_cast<unsigned char>(text[i + 1]))) {
            out += html_escape(text.substr(i + 1, 1));
            i += 2;
            continue;
        }
        if (c == '`') {
            std::size_t close = find_close("`", i + 1);
            if (close != std::string_view::npos) {
                out += "<code>" + html_escape(text.substr(i + 1, close - i - 1)) + "</code>";
                i = close + 1;
                continue;
            }
        }
        if ((c == '*' || c == '_') && i + 1 < text.size() && text[i + 1] == c) {
            std::string marker(2, c);
            std::size_t close = find_close(marker, i + 2);
            if (close != std::string_view::npos && close > i + 2) {
                out += "<strong>" + inline_html(text.substr(i + 2, close - i - 2)) + "</strong>";
                i = close + 2;
                continue;
            }
        }
        if ((c == '*' || c == '_') && i + 1 < text.size() && !std::isspace(static_cast<unsigned char>(text[i + 1]))) {
            std::size_t close = find_close(std::string(1, c), i + 1);
            if (close != std::string_view::npos && close > i + 1) {
                out += "<em>" + inline_html(text.substr(i + 1, close - i - 1)) + "</em>";
                i = close + 1;
                continue;
            }
        }
        if (c == '[') {
            std::size_t close = text.find("](", i + 1);
            std::size_t end = close == std::string_view::npos ? close : text.find(')', close + 2);
            if (close != std::string_view::npos && end != std::string_view::npos) {
                out += "<a href=\"" + html_escape(text.substr(close + 2, end - close - 2)) + "\">" +
                       inline_html(text.substr(i + 1, close - i - 1)) + "</a>";
                i = end + 1;
                continue;
            }
        }
        out += html_escape(text.substr(i, 1));
        ++i;
    }
    return out;
}

std::optional<std::pair<bool, std::string_view>> list_item(std::string_view line) {
    std::string_view t = line;
    while (!t.empty() && t.front() == ' ')
        t.remove_prefix(1);
    if (t.size() >= 2 && (t[0] == '-' || t[0] == '*' || t[0] == '+') && t[1] == ' ')
        return std::pair{false, trim(t.substr(2))};
    std::size_t d = 0;
    while (d < t.size() && std::isdigit(static_cast<unsigned char>(t[d])))
        ++d;
    if (d > 0 && d + 1 < t.size() && (t[d] == '.' || t[d] == ')') && t[d + 1] == ' ')
        return std::pair{true, trim(t.substr(d + 2))};
    return std::nullopt;
}

std::string escape_cell(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '|')
            out += '\\';
        out += c;
    }
    return out;
}

void markdown_table(std::string& out, const std::vector<std::string>& header, const std::vector<DocRow>& rows,
                    bool detail_first) {
    out += '|';
    for (const std::string& h : header)
        out += ' ' + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i)
        out += " --- |";
    out += '\n';
    for (const DocRow& r : rows) {
        const std::string& second = detail_first ? r.detail : r.type;
        const std::string& third = detail_first ? r.type : r.detail;
        out += "| " + escape_cell(r.name) + " | " + escape_cell(second) + " | " + escape_cell(third) + " | " +
               escape_cell(r.doc) + " |\n";
    }
}

void html_table(std::string& out, const std::vector<std::string>& header, const std::vector<DocRow>& rows,
                bool detail_first) {
    out += "<table>\n<thead><tr>";
    for (const std::string& h : header)
        out += "<th>" + html_escape(h) + "</th>";
    out += "</tr></thead>\n<tbody>\n";
    for (const DocRow& r : rows) {
        const std::string& second = detail_first ? r.detail : r.type;
        const std::string& third = detail_first ? r.type : r.detail;
        out += "<tr><td>" + html_escape(r.name) + "</td><td>" + html_escape(second) + "</td><td>" +
               html_escape(third) + "</td><td>" + html_escape(r.doc) + "</td></tr>\n";
    }
    out += "</tbody>\n</table>\n";
}

const std::vector<std::string> kParamHeader = {"Name", "Type", "Default", "Description"};
const std::vector<std::string> kPortHeader = {"Name", "Direction", "Type", "Description"};

// Body text split at the wave block positions.
std::vector<std::string_view> body_segments(const DocModel& model) {
    std::vector<std::string_view> parts;
    std::string_view body = model.body_doc;
    std::size_t prev = 0;
    for (const WaveBlock& w : model.wave_blocks) {
        std::size_t at = std::min(w.position, body.size());
        parts.push_back(body.substr(prev, at - prev));
        prev = at;
    }
    parts.push_back(body.substr(prev));
    return parts;
}

}  // namespace

std::string html_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

bool is_relaxed_json(std::string_view text) { return RelaxedJson(text).valid(); }

void split_wave_blocks(const std::string& text, std::string& body, std::vector<WaveBlock>& blocks) {
    body.clear();
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto info = fence_info(lines[i]);
        if (info && *info == "wavedrom") {
            WaveBlock block;
            block.position = body.size();
            std::size_t j = i + 1;
            for (; j < lines.size(); ++j) {
                auto close = fence_info(lines[j]);
                if (close && close->empty())
                    break;
                if (j > i + 1)
                    block.json += '\n';
                block.json += lines[j];
            }
            blocks.push_back(std::move(block));
            i = j;
            continue;
        }
        body += lines[i];
        if (i + 1 < lines.size())
            body += '\n';
    }
}

DocExtraction extract_docs(const std::vector<const SourceFile*>& files) {
    DocExtraction out;
    for (const SourceFile* file : files) {
        for (const Item& item : file->items) {
            const auto* m = std::get_if<ModuleDecl>(&item);
            if (!m || !m->is_pub)
                continue;
            DocModel model;
            model.name = m->name;
            model.is_pub = true;
            if (m->doc) {
                std::string body;
                split_wave_blocks(m->doc->text, body, model.wave_blocks);
                model.body_doc = std::string(trim(body));
                // Positions were measured before trimming the leading blank lines.
                std::size_t lead = body.find_first_not_of(" \t\r\n");
                lead = lead == std::string::npos ? body.size() : lead;
                for (WaveBlock& w : model.wave_blocks)
                    w.position = std::min(w.position > lead ? w.position - lead : 0, model.body_doc.size());
                for (const WaveBlock& w : model.wave_blocks) {
                    if (!is_relaxed_json(w.json))
                        out.diagnostics.push_back(Diagnostic::make(
                            "W0501", "wavedrom block in the documentation of '" + m->name + "' is not valid JSON",
                            m->doc->span));
                }
            }
            for (const ParamDecl& p : m->params)
                model.params.push_back(
                    DocRow{p.name, format_type(p.type), format_expr(p.value), p.doc ? one_line(p.doc->text) : ""});
            for (const PortDecl& p : m->ports)
                model.ports.push_back(
                    DocRow{p.name, port_type(p.type), to_string(p.direction), p.doc ? one_line(p.doc->text) : ""});
            out.models.push_back(std::move(model));
        }
    }
    return out;
}

std::string render_markdown(const DocModel& model) {
    std::string out = "# " + model.name + "\n\n";
    auto parts = body_segments(model);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto text = trim(parts[i]);
        if (!text.empty())
            out += std::string(text) + "\n\n";
        if (i < model.wave_blocks.size())
            out += "```wavedrom\n" + model.wave_blocks[i].json + "\n```\n\n";
    }
    out += "## Parameters\n\n";
    markdown_table(out, kParamHeader, model.params, false);
    out += "\n## Ports\n\n";
    markdown_table(out, kPortHeader, model.ports, true);
    return out;
}

std::string markdown_to_html(std::string_view markdown) {
    std::string out;
    auto lines = split_lines(markdown);
    std::vector<std::string_view> para;
    int list_kind = -1;  // -1 none, 0 ul, 1 ol

    auto flush_para = [&] {
        if (para.empty())
            return;
        std::string text;
        for (std::size_t i = 0; i < para.size(); ++i) {
            if (i)
                text += '\n';
            text += trim(para[i]);
        }
        out += "<p>" + inline_html(text) + "</p>\n";
        para.clear();
    };
    auto close_list = [&] {
        if (list_kind >= 0) {
            out += list_kind ? "</ol>\n" : "</ul>\n";
            list_kind = -1;
        }
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (trim(line).empty()) {
            flush_para();
            close_list();
            continue;
        }
        if (auto info = fence_info(line)) {
            flush_para();
            close_list();
            std::string code;
            std::size_t j = i + 1;
            for (; j < lines.size(); ++j) {
                auto close = fence_info(lines[j]);
                if (close && close->empty())
                    break;
                code += std::string(lines[j]) + '\n';
            }
            std::string cls = info->empty() ? "" : " class=\"language-" + html_escape(*info) + "\"";
            out += "<pre><code" + cls + ">" + html_escape(code) + "</code></pre>\n";
            i = j;
            continue;
        }
        std::string_view t = trim(line);
        std::size_t level = 0;
        while (level < t.size() && t[level] == '#')
            ++level;
        if (level >= 1 && level <= 6 && (level == t.size() || t[level] == ' ')) {
            flush_para();
            close_list();
            std::string n = std::to_string(level);
            out += "<h" + n + ">" + inline_html(trim(t.substr(level))) + "</h" + n + ">\n";
            continue;
        }
        if (auto item = list_item(line)) {
            flush_para();
            if (list_kind >= 0 && list_kind != int(item->first))
                close_list();
            if (list_kind < 0) {
                list_kind = item->first;
                out += item->first ? "<ol>\n" : "<ul>\n";
            }
            out += "<li>" + inline_html(item->second) + "</li>\n";
            continue;
        }
        close_list();
        para.push_back(line);
    }
    flush_para();
    close_list();
    return out;
}

std::string render_html(const DocModel& model, const std::string& wavedrom_url) {
    std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>" + html_escape(model.name) +
                      "</title>\n";
    bool waves = !model.wave_blocks.empty();
    if (waves)
        out += "<script src=\"" + html_escape(wavedrom_url) + "\"></script>\n";
    out += "</head>\n";
    out += waves ? "<body onload=\"WaveDrom.ProcessAll()\">\n" : "<body>\n";
    out += "<h1>" + html_escape(model.name) + "</h1>\n";
    auto parts = body_segments(model);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += markdown_to_html(parts[i]);
        if (i < model.wave_blocks.size())
            out += "<script type=\"WaveDrom\">\n" + model.wave_blocks[i].json + "\n</script>\n";
    }
    out += "<h2>Parameters</h2>\n";
    html_table(out, kParamHeader, model.params, false);
    out += "<h2>Ports</h2>\n";
    html_table(out, kPortHeader, model.ports, true);
    out += "</body>\n</html>\n";
    return out;
}

namespace {

std::vector<std::string> sorted_names(const std::vector<DocModel>& models) {
    std::vector<std::string> names;
    for (const DocModel& m : models)
        names.push_back(m.name);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

}  // namespace

std::string render_index_markdown(const std::vector<DocModel>& models) {
    std::string out = "# Modules\n\n";
    for (const std::string& name : sorted_names(models))
        out += "- [" + name + "](" + name + ".md)\n";
    return out;
}

std::string render_index_html(const std::vector<DocModel>& models) {
    std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Modules</title>\n</head>\n"
                      "<body>\n<h1>Modules</h1>\n<ul>\n";
    for (const std::string& name : sorted_names(models))
        out += "<li><a href=\"" + html_escape(name) + ".html\">" + html_escape(name) + "</a></li>\n";
    out += "</ul>\n</body>\n</html>\n";
    return out;
}

}  // namespace vl
