#pragma once

#include "ridgeknn/dataset.hpp"
#include "ridgeknn/experiment.hpp"
#include "ridgeknn/hubness.hpp"
#include "ridgeknn/knn.hpp"
#include "ridgeknn/modelselect.hpp"
#include "ridgeknn/pca.hpp"
#include "ridgeknn/pipeline.hpp"
#include "ridgeknn/preprocess.hpp"
#include "ridgeknn/serialize.hpp"
#include "ridgeknn/split.hpp"
#include "ridgeknn/synthetic.hpp"
#include "ridgeknn/targets.hpp"
#include "ridgeknn/theory.hpp"
#include "ridgeknn/transform.hpp"
