#include "sarceval/datamodel.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace sarceval {

std::string_view to_string(Task task) { return task == Task::MSD ? "msd" : "mse"; }
std::string_view to_string(Method method) { return method == Method::Baseline ? "baseline" : "enhanced"; }
std::string_view to_string(Label label) { return label == Label::Sarcastic ? "sarcastic" : "not_sarcastic"; }

std::optional<Task> parse_task(std::string_view s) {
  if (s == "msd" || s == "MSD") return Task::MSD;
  if (s == "mse" || s == "MSE") return Task::MSE;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "baseline") return Method::Baseline;
  if (s == "enhanced") return Method::Enhanced;
  return std::nullopt;
}

std::optional<Label> parse_label_name(std::string_view s) {
  if (s == "sarcastic") return Label::Sarcastic;
  if (s == "not_sarcastic" || s == "unsarcastic") return Label::NotSarcastic;
  return std::nullopt;
}

bool concept_rank_less(const ConceptEdge& a, const ConceptEdge& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.target != b.target) return a.target < b.target;
  if (a.relation != b.relation) return a.relation < b.relation;
  return a.source < b.source;
}

const std::vector<std::string>& metric_names(Task task) {
  static const std::vector<std::string> msd{"accuracy", "f1"};
  static const std::vector<std::string> mse{"bleu1", "bleu2", "bleu3", "bleu4",
                                            "rouge1", "rouge2", "rougeL", "meteor"};
  return task == Task::MSD ? msd : mse;
}

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes) {
    if (EVP_DigestUpdate(ctx_, bytes.data(), bytes.size()) != 1) throw std::runtime_error("sha256 update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, digest.data(), &len) != 1) throw std::runtime_error("sha256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string fingerprint(std::string_view bytes) {
  Sha256 sha;
  sha.update(bytes);
  return sha.hex();
}

std::string fingerprint_fields(std::initializer_list<std::string_view> fields) {
  Sha256 sha;
  for (auto field : fields) {
    sha.update(std::to_string(field.size()));
    sha.update(":");
    sha.update(field);
  }
  return sha.hex();
}

}  // namespace sarceval
