#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vl/ast.hpp"
#include "vl/diagnostic.hpp"

namespace vl {

struct DocRow {
    std::string name;
    std::string type;
    std::string detail;  // default value for params, direction for ports
    std::string doc;
};

struct WaveBlock {
    std::string json;          // fence content, verbatim
    std::size_t position = 0;  // byte offset in body_doc where the fence stood
};

struct DocModel {
    std::string name;
    bool is_pub = false;
    std::string body_doc;  // CommonMark with the wavedrom fences removed
    std::vector<WaveBlock> wave_blocks;
    std::vector<DocRow> params;
    std::vector<DocRow> ports;
};

struct DocExtraction {
    std::vector<DocModel> models;  // pub modules in file order
    Diagnostics diagnostics;       // W0501
};

DocExtraction extract_docs(const std::vector<const SourceFile*>& files);

// Splits ```wavedrom fences out of a doc text.
void split_wave_blocks(const std::string& text, std::string& body, std::vector<WaveBlock>& blocks);

// Accepts JSON plus the JavaScript object-literal relaxations WaveDrom
// sources use: unquoted keys, single-quoted strings, trailing commas.
bool is_relaxed_json(std::string_view text);

std::string render_markdown(const DocModel& model);
std::string render_html(const DocModel& model, const std::string& wavedrom_url = "wavedrom.min.js");

// Index pages listing the models alphabetically.
std::string render_index_markdown(const std::vector<DocModel>& models);
std::string render_index_html(const std::vector<DocModel>& models);

// Minimal CommonMark block/inline conversion: headings, paragraphs, fenced
// code, lists, emphasis, inline code and links.
std::string markdown_to_html(std::string_view markdown);

std::string html_escape(std::string_view text);

}  // namespace vl
