#include "forexpulse.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "featurize.hpp"
#include "manipulation.hpp"
#include "pipeline.hpp"
#include "stance.hpp"
#include "types.hpp"
#include "util.hpp"

struct fxp_config {
  fxp::PipelineConfig cfg;
};

struct fxp_model {
  fxp::TwoPlaneModel model;
};

namespace {

thread_local std::string g_last_error;

fxp_status status_of(fxp::Errc c) {
  switch (c) {
    case fxp::Errc::invalid_argument: return FXP_ERR_INVALID_ARGUMENT;
    case fxp::Errc::io: return FXP_ERR_IO;
    case fxp::Errc::parse: return FXP_ERR_PARSE;
    case fxp::Errc::data: return FXP_ERR_DATA;
    case fxp::Errc::numeric: return FXP_ERR_NUMERIC;
    case fxp::Errc::internal: return FXP_ERR_INTERNAL;
  }
  return FXP_ERR_INTERNAL;
}

fxp_status fail(fxp_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

/// Runs fn inside the exception barrier; nothing may throw past this file.
template <typename Fn>
fxp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FXP_OK;
  } catch (const fxp::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FXP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FXP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FXP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fxp_version(void) { return "1.0.0"; }

const char* fxp_last_error(void) { return g_last_error.c_str(); }

int fxp_status_exit_code(fxp_status s) {
  switch (s) {
    case FXP_OK: return 0;
    case FXP_ERR_INVALID_ARGUMENT:
    case FXP_ERR_IO: return 1;
    default: return 2;
  }
}

void fxp_string_free(char* s) { std::free(s); }

fxp_config* fxp_config_new(void) { return new (std::nothrow) fxp_config{}; }

void fxp_config_free(fxp_config* cfg) { delete cfg; }

fxp_status fxp_config_load_file(fxp_config* cfg, const char* path) {
  if (!cfg) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_config_load_file: cfg is NULL");
  if (!path) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_config_load_file: path is NULL");
  return guarded([&] { cfg->cfg.merge_file(path); });
}

fxp_status fxp_config_set(fxp_config* cfg, const char* key, const char* value) {
  if (!cfg) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_config_set: cfg is NULL");
  if (!key || !value) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_config_set: key and value must be non-NULL");
  return guarded([&] { cfg->cfg.set(key, value); });
}

fxp_status fxp_config_render(const fxp_config* cfg, char** out) {
  if (!cfg || !out) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_config_render: cfg and out must be non-NULL");
  return guarded([&] {
    char* s = dup_string(cfg->cfg.render());
    if (!s) throw std::bad_alloc();
    *out = s;
  });
}

fxp_status fxp_run(const fxp_config* cfg, const char* subcommand) {
  if (!cfg) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_run: cfg is NULL");
  if (!subcommand) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_run: subcommand is NULL");
  return guarded([&] { fxp::run_pipeline(cfg->cfg, subcommand); });
}

fxp_status fxp_model_load(const char* path, fxp_model** out) {
  if (!path || !out) return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_model_load: path and out must be non-NULL");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fxp::Error(fxp::Errc::io, std::string("cannot open model file: ") + path);
    auto m = std::make_unique<fxp_model>();
    m->model = fxp::load_model(in);
    *out = m.release();
  });
}

void fxp_model_free(fxp_model* m) { delete m; }

uint32_t fxp_model_dim(const fxp_model* m) { return m ? m->model.dim : 0; }

fxp_status fxp_model_classify_text(const fxp_model* m, const char* text, fxp_stance* out) {
  if (!m || !text || !out)
    return fail(FXP_ERR_INVALID_ARGUMENT, "fxp_model_classify_text: all arguments must be non-NULL");
  return guarded([&] {
    fxp::FeatureVector x = fxp::featurize(text, m->model.dim);
    *out = static_cast<fxp_stance>(fxp::stance_index(fxp::classify_stance(m->model, x)));
  });
}

int64_t fxp_edit_distance(const char* a, const char* b) {
  if (!a || !b) {
    fail(FXP_ERR_INVALID_ARGUMENT, "fxp_edit_distance: inputs must be non-NULL");
    return -1;
  }
  return fxp::edit_distance(a, b);
}

int fxp_is_recommendation(const char* text) {
  if (!text) {
    fail(FXP_ERR_INVALID_ARGUMENT, "fxp_is_recommendation: text is NULL");
    return 0;
  }
  static const fxp::RecommendationLexicon lexicon = fxp::RecommendationLexicon::defaults();
  return fxp::is_recommendation(text, lexicon) ? 1 : 0;
}

}  // extern "C"
