// JSON shapes as the capture service sends them; field names stay snake_case
// so payloads can be used without mapping.

export interface LabelInfo {
  kind: string;
  text: string;
}

export interface OverrideInfo {
  label: LabelInfo;
  note: string;
}

export interface ScanInfo {
  scan_id: string;
  sequence_index: number;
  status: "active" | "marked_duplicate";
  image_url: string;
  label: LabelInfo | null;
  override: OverrideInfo | null;
  effective_label: LabelInfo | null;
  suggested_label: LabelInfo | null;
}

export interface PaginationReport {
  complete: boolean;
  unlabeled: string[];
  conflicts: string[][];
}

export type VolumeStateName = "page_numbering" | "article_entry" | "finalized";

export interface VolumeInfo {
  volume_id: string;
  full_title: string;
  series: string | null;
  stem: string;
  volume_number: number | string;
  publication_year: number;
  publication_month: number;
  pub_date: string;
  state: VolumeStateName;
  version: number;
  scan_count: number;
  article_count: number;
  pagination: PaginationReport;
}

export interface AuthorInfo {
  last_name: string;
  rest: string;
  display: string;
}

export interface ArticleInfo {
  article_id: string;
  title: string;
  authors: AuthorInfo[];
  first_page: string;
  last_page: string;
  abstract: string | null;
  bibcode: string | null;
}

export interface ScanListing {
  volume_id: string;
  version: number;
  state: VolumeStateName;
  scans: ScanInfo[];
}

export interface PageActionResult {
  volume_id: string;
  version: number;
  state: VolumeStateName;
  scan: ScanInfo;
}

export interface ArticleListing {
  volume_id: string;
  version: number;
  articles: ArticleInfo[];
}

export interface CreateArticleResult {
  volume_id: string;
  version: number;
  article: ArticleInfo;
}

export interface ExportedRecord {
  bibcode: string;
  title: string;
  authors: string;
  journal_ref: string;
  pub_date: string;
  origin: string;
}

export interface FinalizeResult {
  volume_id: string;
  version: number;
  state: VolumeStateName;
  records: ExportedRecord[];
  text: string;
}

export interface AuthorInput {
  last_name: string;
  rest: string;
}

export type PageAction =
  | { action: "assign"; scan_id: string; label: string }
  | { action: "override"; scan_id: string; label: string; note: string }
  | { action: "mark_duplicate"; scan_id: string }
  | { action: "unmark_duplicate"; scan_id: string };
