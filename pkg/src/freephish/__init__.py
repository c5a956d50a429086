"""Detection, measurement and takedown tooling for phishing websites hosted
on free web-hosting domains (FHDs)."""

__version__ = "0.1.0"

from .errors import (CorpusError, DatasetError, FreephishError,
                     ObservationLogError, RegistryError, ReportError,
                     ScannerError, SchemaMismatchError, TransportError,
                     UndefinedSimilarityError, UrlError)
from .features import (FEATURE_NAMES, FEATURE_SCHEMA_VERSION, Brand,
                       ExtractorConfig, FeatureVector, FixtureScanner,
                       default_config, detect_banner_obfuscation,
                       detect_credential_fields, detect_external_phish_link,
                       detect_malicious_download, detect_noindex,
                       extract_features, identify_target, link_ratios,
                       url_keyword_hit)
from .forest import (Forest, ForestParams, LabeledDataset, Metrics, Verdict,
                     compute_metrics, evaluate, load_forest, predict, roc_auc,
                     save_forest, split_train_test, train_forest)
from .keywords import derive_keywords
from .monitor import (CoverageReport, FixtureEntityClient, ObservationEvent,
                      ObservationLog, SimClock, coverage, is_active,
                      poll_cycle, run_monitor)
from .registry import (CanonicalUrl, FhdEntry, FhdMatch, Registry,
                       canonicalize, default_registry, load_registry,
                       match_fhd)
from .reporting import (AbuseReport, assign_arm, build_report, removal_comparison,
                        render_email, write_message_file)
from .service import ClassifierService, ServiceConfig, VerdictCache
from .similarity import (SimilarityResult, TagSequence, compare_pages,
                         directional_similarity, extract_tags, levenshtein,
                         site_similarity)
from .snapshots import (FeedItem, FixtureFetcher, Snapshot, SnapshotStore,
                        ingest, load_corpus, load_feed)
from .stats import TTestResult, format_hhmm, mann_whitney_u, paired_t_test
from .synthetic import make_synthetic_dataset
