// JSON shapes of the authoring-service API.

export interface StreamJson {
    id: string;
    t0: number;
    t1: number;
    color: string;
    sizes: [number, number][];
    parent: string | null;
}

export interface LinkJson {
    from: string;
    t0: number;
    to: string;
    t1: number | null;
    merge: boolean;
}

export interface LabelJson {
    stream: string;
    t: number;
    text: string;
    type: "in" | "out" | "on";
    size: number;
}

export interface ChartJson {
    revision: number;
    streams: StreamJson[];
    links: LinkJson[];
    labels: LabelJson[];
}

export interface LayoutNode {
    id: number;
    kind: string;
    owner: string;
    t: number;
    x: number;
    y: number;
    size: number;
    parent: number | null;
}

export interface LayoutJson {
    revision: number;
    nodes: LayoutNode[];
}

export interface ConfigJson {
    canvas: { width: number; height: number; margin: number };
    step: number;
    defaultSize: number;
    [key: string]: unknown;
}

export interface Violation {
    table: string;
    entity: string;
    message: string;
}

export type EditOp =
    | { op: "add_stream"; t0: number; t1: number; color: string; parent?: string }
    | {
          op: "add_link";
          from: string | null;
          t0: number;
          to: string | null;
          t1?: number;
          merge: boolean;
          fromSpan?: [number, number];
          toSpan?: [number, number];
          color?: string;
      }
    | { op: "set_size_at"; stream: string; t: number; size: number }
    | { op: "add_label"; stream: string; t: number; text: string; type: string; size: number }
    | { op: "delete"; kind: "stream" | "link" | "label"; id: string }
    | { op: "replace_csv"; table: "streams" | "links" | "labels"; text: string };
