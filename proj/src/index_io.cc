#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "evidencer/error.h"
#include "evidencer/index.h"

namespace evidencer {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'I', 'X'};
constexpr size_t kHeaderSize = 16;  // magic, version, total length

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void str(const std::string &s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_ += s;
  }
  void raw(const char *p, size_t n) { buf_.append(p, n); }
  void patch_u64(size_t offset, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_[offset + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  std::string &bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string &buf, size_t begin, size_t end)
      : buf_(buf), pos_(begin), end_(end) {}

  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(buf_[pos_++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(size_t n) {
    if (end_ - pos_ < n) throw Error(ErrorCode::kParse, "corrupt index: record overruns data");
  }

  const std::string &buf_;
  size_t pos_;
  size_t end_;
};

uint32_t Crc32(const char *data, size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  while (n > 0) {
    uInt chunk = static_cast<uInt>(std::min<size_t>(n, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef *>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<uint32_t>(crc);
}

void WriteRole(Writer &w, const Role &role) {
  if (const auto *hit = std::get_if<LexiconHit>(&role)) {
    w.u8(0);
    w.str(hit->lexicon);
  } else if (const auto *ne = std::get_if<NamedEntity>(&role)) {
    w.u8(1);
    w.str(std::string(to_string(ne->kind)));
  } else {
    w.u8(2);
    w.str(std::get<WikiLink>(role).title);
  }
}

Role ReadRole(Reader &r) {
  uint8_t tag = r.u8();
  std::string payload = r.str();
  switch (tag) {
    case 0: return LexiconHit{std::move(payload)};
    case 1: {
      auto kind = parse_entity_kind(payload);
      if (!kind) throw Error(ErrorCode::kParse, "corrupt index: bad entity kind");
      return NamedEntity{*kind};
    }
    case 2: return WikiLink{std::move(payload)};
    default: throw Error(ErrorCode::kParse, "corrupt index: bad role tag");
  }
}

}  // namespace

void save_index(const SemanticIndex &index, const std::filesystem::path &path) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kIndexFormatVersion);
  w.u64(0);  // total length, patched below

  w.u64(index.doc_count());
  w.u64(index.sentence_count());
  for (const DocumentInfo &doc : index.documents()) {
    w.str(doc.doc_id);
    w.str(doc.source);
  }
  for (const Sentence &s : index.sentences()) {
    w.str(s.id.doc_id);
    w.u32(s.id.index);
    w.str(s.text);
    w.u32(static_cast<uint32_t>(s.tokens.size()));
    for (const Token &t : s.tokens) {
      w.str(t.surface);
      w.str(t.normalized);
      w.u32(t.span.start);
      w.u32(t.span.end);
    }
    w.u32(static_cast<uint32_t>(s.annotations.size()));
    for (const AnnotationSpan &a : s.annotations) {
      w.u32(a.range.first);
      w.u32(a.range.last);
      WriteRole(w, a.role);
    }
  }
  w.u32(static_cast<uint32_t>(index.postings().size()));
  for (const auto &[key, list] : index.postings()) {
    w.u8(static_cast<uint8_t>(key.kind));
    w.str(key.payload);
    w.u32(static_cast<uint32_t>(list.size()));
  }
  for (const auto &[key, list] : index.postings()) {
    for (const Posting &p : list) {
      w.u32(p.sentence);
      w.u32(p.first);
      w.u32(p.last);
    }
  }
  w.patch_u64(8, w.bytes().size() + 4);
  w.u32(Crc32(w.bytes().data(), w.bytes().size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write index " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

SemanticIndex load_index(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open index " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() >= 4 && std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kVersionMismatch, "not an index file (bad magic): " + path.string());
  }
  if (buf.size() < kHeaderSize) {
    throw Error(ErrorCode::kTruncated, "index header truncated: " + path.string());
  }
  Reader header(buf, 4, kHeaderSize);
  uint32_t version = header.u32();
  if (version != kIndexFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "index format version " + std::to_string(version) +
                    ", expected " + std::to_string(kIndexFormatVersion));
  }
  uint64_t total = header.u64();
  if (buf.size() < total) {
    throw Error(ErrorCode::kTruncated,
                "index truncated: " + std::to_string(buf.size()) + " of " +
                    std::to_string(total) + " bytes");
  }
  if (buf.size() > total || total < kHeaderSize + 4) {
    throw Error(ErrorCode::kChecksum, "index has trailing bytes: " + path.string());
  }
  const size_t body_end = buf.size() - 4;
  Reader trailer(buf, body_end, buf.size());
  if (trailer.u32() != Crc32(buf.data(), body_end)) {
    throw Error(ErrorCode::kChecksum, "index checksum mismatch: " + path.string());
  }

  Reader r(buf, kHeaderSize, body_end);
  SemanticIndex index;
  uint64_t doc_count = r.u64();
  uint64_t sentence_count = r.u64();
  for (uint64_t i = 0; i < doc_count; ++i) {
    DocumentInfo doc;
    doc.doc_id = r.str();
    doc.source = r.str();
    index.documents_.push_back(std::move(doc));
  }
  for (uint64_t i = 0; i < sentence_count; ++i) {
    Sentence s;
    s.id.doc_id = r.str();
    s.id.index = r.u32();
    s.text = r.str();
    uint32_t ntok = r.u32();
    for (uint32_t t = 0; t < ntok; ++t) {
      Token tok;
      tok.surface = r.str();
      tok.normalized = r.str();
      tok.span.start = r.u32();
      tok.span.end = r.u32();
      s.tokens.push_back(std::move(tok));
    }
    uint32_t nann = r.u32();
    for (uint32_t a = 0; a < nann; ++a) {
      AnnotationSpan span;
      span.range.first = r.u32();
      span.range.last = r.u32();
      span.role = ReadRole(r);
      s.annotations.push_back(std::move(span));
    }
    index.sentences_.push_back(std::move(s));
  }
  uint32_t nkeys = r.u32();
  std::vector<std::pair<IndexKey, uint32_t>> dictionary;
  dictionary.reserve(nkeys);
  for (uint32_t k = 0; k < nkeys; ++k) {
    uint8_t kind = r.u8();
    if (kind > 3) throw Error(ErrorCode::kParse, "corrupt index: bad key kind");
    IndexKey key{static_cast<IndexKey::Kind>(kind), r.str()};
    dictionary.emplace_back(std::move(key), r.u32());
  }
  for (auto &[key, count] : dictionary) {
    std::vector<Posting> list;
    list.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
      Posting p;
      p.sentence = r.u32();
      p.first = r.u32();
      p.last = r.u32();
      if (p.sentence >= sentence_count) {
        throw Error(ErrorCode::kParse, "corrupt index: posting past sentence store");
      }
      list.push_back(p);
    }
    index.postings_.emplace(std::move(key), std::move(list));
  }
  if (!r.done()) throw Error(ErrorCode::kParse, "corrupt index: unread bytes");
  return index;
}

}  // namespace evidencer
