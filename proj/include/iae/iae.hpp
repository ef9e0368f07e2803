#pragma once

#include "iae/cascade.hpp"
#include "iae/combinations.hpp"
#include "iae/config.hpp"
#include "iae/embedding.hpp"
#include "iae/evaluation.hpp"
#include "iae/synthetic.hpp"
#include "iae/training.hpp"
