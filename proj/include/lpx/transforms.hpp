#ifndef LPX_TRANSFORMS_HPP_
#define LPX_TRANSFORMS_HPP_

#include <lpx/transforms/combine.hpp>
#include <lpx/transforms/dlp_to_nlp.hpp>
#include <lpx/transforms/saturation.hpp>
#include <lpx/transforms/shift.hpp>
#include <lpx/transforms/universal.hpp>

#endif  // LPX_TRANSFORMS_HPP_
