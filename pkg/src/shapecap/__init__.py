"""shapecap: synthetic shape-scene caption datasets and caption quality metrics."""

from .captions import GenerationError, generate_caption, random_caption
from .datapipeline import (
    BOTS,
    DatasetError,
    DatasetHandle,
    DatasetSpec,
    Instance,
    build_run,
    generate_dataset,
    generate_eval_instances,
    generate_instance,
    load_dataset,
    make_baseline,
    read_candidates,
)
from .grammar import (
    CaptionAst,
    Construction,
    Count,
    Descriptor,
    Existential,
    Frame,
    Kind,
    Ratio,
    Relation,
    Spatial,
    construction_of,
    grammar_fingerprint,
    parse,
    realize,
    tokenize,
)
from .metrics import (
    GtdReport,
    RunInput,
    RunInstance,
    bleu4_sentence,
    bleu_tokenize,
    diversity_ratio,
    evaluate_run,
    grammaticality_ratio,
    truthfulness_ratio,
    tuple_f1,
)
from .render import COLOR_TABLE, color_table_fingerprint, render, write_png
from .semantics import (
    Proposition,
    Verdict,
    evaluate,
    evaluate_caption,
    matches,
    oracle_evaluate,
    scene_tuples,
    to_proposition,
)
from .worldmodel import (
    TASKS,
    Color,
    Entity,
    SamplingError,
    Shape,
    WorldModel,
    WorldSpec,
    bounding_box,
    overlap_ratio,
    sample_world,
    task_world_spec,
)

__version__ = "0.1.0"
