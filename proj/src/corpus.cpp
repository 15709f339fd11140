// src/corpus.cpp

// Copyright 2026  The rwd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rwd/corpus.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rwd/error.hpp"

namespace rwd {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string to_nfc(const icu::UnicodeString &s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("internal", "ICU NFC normalizer unavailable");
  icu::UnicodeString out = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw Error("internal", "ICU normalization failed");
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

}  // namespace

std::string normalize_word(std::string_view raw) {
  if (raw.empty()) return {};
  // Pure-ASCII fast path; identical result to the ICU route below.
  if (std::all_of(raw.begin(), raw.end(),
                  [](char c) { return static_cast<unsigned char>(c) < 0x80; })) {
    std::size_t b = 0, e = raw.size();
    while (b < e && u_ispunct(static_cast<UChar32>(raw[b]))) ++b;
    while (e > b && u_ispunct(static_cast<UChar32>(raw[e - 1]))) --e;
    std::string out(raw.substr(b, e - b));
    for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("internal", "ICU NFC normalizer unavailable");
  s = nfc->normalize(s, status);
  s.toLower(icu::Locale::getRoot());

  // Strip code points of general category P* from both ends.
  int32_t begin = 0, end = s.length();
  while (begin < end) {
    UChar32 c = s.char32At(begin);
    if (!u_ispunct(c)) break;
    begin += U16_LENGTH(c);
  }
  while (end > begin) {
    int32_t prev = s.moveIndex32(end, -1);
    if (!u_ispunct(s.char32At(prev))) break;
    end = prev;
  }
  return to_nfc(s.tempSubStringBetween(begin, end));
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize_transcript(std::string_view text) {
  std::vector<std::string> out;
  for (const auto &piece : split_whitespace(text)) {
    std::string w = normalize_word(piece);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

Utterance Utterance::make(std::string id, std::string speaker_id, double duration_s,
                          std::string transcript_raw, std::string translation_raw,
                          std::string embedding_ref) {
  Utterance u;
  u.id = std::move(id);
  u.speaker_id = std::move(speaker_id);
  u.duration_s = duration_s;
  u.transcript_tokens = tokenize_transcript(transcript_raw);
  u.transcript_raw = std::move(transcript_raw);
  u.translation_raw = std::move(translation_raw);
  u.embedding_ref = std::move(embedding_ref);
  return u;
}

bool Utterance::contains_token(std::string_view word) const {
  return std::find(transcript_tokens.begin(), transcript_tokens.end(), word) !=
         transcript_tokens.end();
}

Corpus::Corpus(std::string name, std::vector<Utterance> utterances) : name_(std::move(name)) {
  utts_.reserve(utterances.size());
  for (auto &u : utterances) add(std::move(u));
}

void Corpus::add(Utterance utt) {
  if (utt.id.empty()) throw ValidationError("utterance with empty id");
  if (!(utt.duration_s >= 0.0))
    throw ValidationError("utterance '" + utt.id + "' has negative duration");
  auto [it, inserted] = index_.emplace(utt.id, utts_.size());
  if (!inserted) throw ValidationError("duplicate utterance id '" + utt.id + "'");
  utts_.push_back(std::move(utt));
}

bool Corpus::contains(std::string_view id) const { return find(id) != nullptr; }

const Utterance *Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &utts_[it->second];
}

const Utterance &Corpus::at(std::string_view id) const {
  const Utterance *u = find(id);
  if (!u) throw ValidationError("unknown utterance id '" + std::string(id) + "'");
  return *u;
}

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\') {
      out += field[i];
      continue;
    }
    if (i + 1 == field.size()) throw ParseError("dangling backslash in field");
    switch (field[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case '\\': out += '\\'; break;
      default: throw ParseError(std::string("unknown escape \\") + field[i]);
    }
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Corpus parse_manifest_text(std::string_view text, std::string name) {
  Corpus corpus(std::move(name));
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kManifestHeader) throw ParseError("bad manifest header", line_no);
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 6)
      throw ParseError("expected 6 columns, found " + std::to_string(cols.size()), line_no);
    double duration = 0.0;
    auto [ptr, ec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), duration);
    if (ec != std::errc() || ptr != cols[2].data() + cols[2].size())
      throw ParseError("bad duration '" + std::string(cols[2]) + "'", line_no);
    try {
      corpus.add(Utterance::make(unescape_field(cols[0]), unescape_field(cols[1]), duration,
                                 unescape_field(cols[3]), unescape_field(cols[4]),
                                 unescape_field(cols[5])));
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    } catch (const ValidationError &e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_header) throw ParseError("missing manifest header", 1);
  return corpus;
}

Corpus parse_manifest(const std::filesystem::path &path) {
  return parse_manifest_text(read_file(path), path.stem().string());
}

std::string format_manifest(const Corpus &corpus) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto &u : corpus) {
    out += escape_field(u.id);
    out += '\t';
    out += escape_field(u.speaker_id);
    out += '\t';
    out += format_double(u.duration_s);
    out += '\t';
    out += escape_field(u.transcript_raw);
    out += '\t';
    out += escape_field(u.translation_raw);
    out += '\t';
    out += escape_field(u.embedding_ref);
    out += '\n';
  }
  return out;
}

void write_manifest(const Corpus &corpus, const std::filesystem::path &path) {
  write_file_atomic(path, format_manifest(corpus));
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path &path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

}  // namespace rwd
