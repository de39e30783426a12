#pragma once

#include "hdsft/errors.hpp"
#include "hdsft/rng.hpp"
#include "hdsft/model.hpp"
#include "hdsft/hashing.hpp"
#include "hdsft/bucketfilter.hpp"
#include "hdsft/linesampler.hpp"
#include "hdsft/toneest.hpp"
#include "hdsft/pipeline.hpp"
#include "hdsft/generator.hpp"
#include "hdsft/dense.hpp"
#include "hdsft/oracle_eval.hpp"
#include "hdsft/verify.hpp"
#include "hdsft/io.hpp"
