#include "posegait/loss/supcon.hpp"
#include "posegait/loss/triplet.hpp"

namespace posegait::loss {

TripletVariant triplet_variant_from_string(const std::string& s) {
  if (s == "batch_all") return TripletVariant::batch_all;
  if (s == "batch_hard") return TripletVariant::batch_hard;
  throw Error(errc::config, "unknown triplet variant '" + s + "'");
}

std::string to_string(TripletVariant v) {
  return v == TripletVariant::batch_all ? "batch_all" : "batch_hard";
}

SupConViews supcon_views_from_string(const std::string& s) {
  if (s == "one") return SupConViews::one;
  if (s == "two") return SupConViews::two;
  throw Error(errc::config, "unknown supcon view mode '" + s + "'");
}

std::string to_string(SupConViews v) {
  return v == SupConViews::one ? "one" : "two";
}

TripletResult<double> triplet_loss(const EmbeddingSet& emb, const TripletLossSpec& spec,
                                   bool with_grad) {
  spec.validate();
  validate_embeddings(emb);
  const auto* data = emb.vectors.data.data();
  const auto n = emb.vectors.rows;
  const auto d = emb.vectors.cols;
  return spec.variant == TripletVariant::batch_all
             ? triplet_batch_all<double>(data, n, d, emb.labels.data(), spec.margin,
                                         with_grad)
             : triplet_batch_hard<double>(data, n, d, emb.labels.data(), spec.margin,
                                          with_grad);
}

SupConResult<double> supcon(const EmbeddingSet& emb, const SupConSpec& spec,
                            bool with_grad) {
  validate_embeddings(emb);
  return supcon_loss<double>(emb.vectors.data.data(), emb.vectors.rows,
                             emb.vectors.cols, emb.labels.data(), spec, with_grad);
}

}  // namespace posegait::loss
